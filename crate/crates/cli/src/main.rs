use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bhzeta::duality::{self, Check, ScanConfig, ShapeFilter};
use bhzeta::report::{self, AnalyzeOptions};
use bhzeta::{geomroot, zeta, CyclotomicFunction, InvertiblePolynomial, ParseOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "bhzeta",
    version,
    about = "Zeta functions, roots and duality for invertible polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Accept and ignore non-unit coefficients.
    #[arg(long, global = true)]
    allow_coefficients: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Latex,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weights, transpose, zeta functions, roots and Saito dual.
    Analyze {
        input: String,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Berglund–Hübsch transpose.
    Transpose { input: String },
    /// Monodromy zeta function.
    Zeta { input: String },
    /// Roots of the reduced zeta function and the geometric root.
    Root {
        input: String,
        /// Root degree, defaults to the weight gcd.
        #[arg(long)]
        k: Option<u64>,
        /// List every root with exponents bounded by this value.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Saito dual of the reduced zeta function.
    Dual {
        input: String,
        /// Duality degree, defaults to the common degree.
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Run a duality check on one polynomial.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Run checks over enumerated polynomials.
    Scan(ScanArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Theorem1 {
        input: String,
    },
    Theorem2 {
        input: String,
    },
    Remark2 {
        input: String,
    },
    Orbit {
        input: String,
    },
    /// Recompute the reference values of the worked examples.
    References,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Numbers of variables.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    min_exp: u64,
    #[arg(long, default_value_t = 5)]
    max_exp: u64,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "chain,loop,mixed"
    )]
    shapes: Vec<Shape>,
    #[arg(long, value_enum, value_delimiter = ',')]
    check: Vec<CheckArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Chain,
    Loop,
    Mixed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CheckArg {
    Theorem1,
    Theorem2,
    Remark2,
    Oracle,
    Milnor,
}

impl From<CheckArg> for Check {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Theorem1 => Check::Theorem1,
            CheckArg::Theorem2 => Check::Theorem2,
            CheckArg::Remark2 => Check::Remark2,
            CheckArg::Oracle => Check::Oracle,
            CheckArg::Milnor => Check::Milnor,
        }
    }
}

/// Bad input, reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Rendered result plus whether the checks it carries passed.
struct Output {
    body: String,
    passed: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, passed: true }
    }
}

fn read_input(input: &str, global: &Global) -> anyhow::Result<(InvertiblePolynomial, Vec<String>)> {
    let path = Path::new(input);
    let text = if path.is_file() {
        fs::read_to_string(path).with_context(|| format!("reading {input}"))?
    } else {
        input.to_string()
    };
    let parsed = if text.trim_start().starts_with('{') {
        InvertiblePolynomial::from_json(&text).map(|p| (p, Vec::new()))
    } else {
        bhzeta::parse_polynomial(
            text.trim(),
            &ParseOptions {
                allow_coefficients: global.allow_coefficients,
            },
        )
        .map(|p| (p.polynomial, p.warnings))
    };
    parsed.map_err(|e| UsageError(format!("invalid input {input:?}: {e}")).into())
}

/// Key/value listing used by the verbs without a dedicated table layout.
enum Field {
    Text(String),
    Zeta(Option<CyclotomicFunction>),
}

fn render_fields(fields: &[(&str, Field)], json: Value, format: Format) -> anyhow::Result<String> {
    let plain = |f: &Field| match f {
        Field::Text(s) => s.clone(),
        Field::Zeta(Some(z)) => z.to_string(),
        Field::Zeta(None) => "none".into(),
    };
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&json)? + "\n",
        Format::Text => fields
            .iter()
            .map(|(k, v)| format!("{k}: {}\n", plain(v)))
            .collect(),
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in fields {
                let v = plain(v);
                if v.contains([',', '"', '\n']) {
                    out.push_str(&format!("{k},\"{}\"\n", v.replace('"', "\"\"")));
                } else {
                    out.push_str(&format!("{k},{v}\n"));
                }
            }
            out
        }
        Format::Latex => {
            let mut out = String::from("\\begin{tabular}{ll}\n");
            for (k, v) in fields {
                let v = match v {
                    Field::Zeta(Some(z)) => format!("${}$", z.to_latex()),
                    other => plain(other),
                };
                out.push_str(&format!("{k} & {v} \\\\\n"));
            }
            out.push_str("\\end{tabular}\n");
            out
        }
    })
}

fn structured<T: serde::Serialize>(
    value: &T,
    format: Format,
    text: impl FnOnce() -> String,
) -> anyhow::Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(value)? + "\n"),
        _ => Ok(text()),
    }
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    let g = &cli.global;
    let fmt = g.format;
    match &cli.command {
        Command::Analyze { input, k, degree } => {
            let (f, warnings) = read_input(input, g)?;
            let mut a = report::analyze(
                &f,
                &AnalyzeOptions {
                    k: *k,
                    degree: *degree,
                },
            )?;
            a.notes.extend(warnings);
            let body = match fmt {
                Format::Json => serde_json::to_string_pretty(&a)? + "\n",
                Format::Text => report::analysis_text(&a),
                Format::Csv => report::analysis_csv(&a)?,
                Format::Latex => report::analysis_latex(&a),
            };
            Ok(Output::ok(body))
        }
        Command::Transpose { input } => {
            let (f, _) = read_input(input, g)?;
            let ft = f.transpose();
            let w = ft.canonical_weights()?;
            let json = json!({ "polynomial": ft.to_string(), "matrix": ft.matrix(), "weights": w });
            let fields = [
                ("transpose", Field::Text(ft.to_string())),
                ("weights", Field::Text(w.to_string())),
                ("c", Field::Text(w.gcd.to_string())),
            ];
            Ok(Output::ok(render_fields(&fields, json, fmt)?))
        }
        Command::Zeta { input } => {
            let (f, _) = read_input(input, g)?;
            let (z, route) = zeta::zeta_with_route(&f)?;
            let reduced = z.reduce();
            let route = serde_json::to_value(route)?;
            let json = json!({ "zeta": z, "reduced_zeta": reduced, "route": route });
            let fields = [
                ("zeta", Field::Zeta(Some(z))),
                ("reduced zeta", Field::Zeta(Some(reduced))),
                (
                    "route",
                    Field::Text(route.as_str().unwrap_or_default().to_string()),
                ),
            ];
            Ok(Output::ok(render_fields(&fields, json, fmt)?))
        }
        Command::Root { input, k, bound } => {
            let (f, _) = read_input(input, g)?;
            let k = match k {
                Some(0) => bail!(UsageError("--k must be positive".into())),
                Some(k) => *k,
                None => geomroot::default_degree(&f)?,
            };
            let reduced = zeta::reduced_zeta(&f)?;
            let canonical = reduced.canonical_root(k);
            let solutions = geomroot::count_solutions(f.matrix(), k);
            let geometric = match geomroot::geometric_root_zeta(&f, k) {
                Ok(z) => Some(z.reduce()),
                Err(bhzeta::Error::NoGeometricRoot { .. } | bhzeta::Error::UnsupportedShape(_)) => {
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let roots = bound.map(|b| reduced.enumerate_roots(k, b));
            let json = json!({
                "k": k,
                "reduced_zeta": reduced,
                "root": canonical,
                "roots": roots,
                "solutions": solutions.to_string(),
                "geometric_root": geometric,
            });
            let mut fields = vec![
                ("k", Field::Text(k.to_string())),
                ("reduced zeta", Field::Zeta(Some(reduced))),
                ("root", Field::Zeta(canonical)),
                ("solutions", Field::Text(solutions.to_string())),
                ("geometric root", Field::Zeta(geometric)),
            ];
            if let Some(roots) = roots {
                fields.push(("roots within bound", Field::Text(roots.len().to_string())));
                fields.extend(roots.into_iter().map(|r| ("root", Field::Zeta(Some(r)))));
            }
            Ok(Output::ok(render_fields(&fields, json, fmt)?))
        }
        Command::Dual { input, degree } => {
            let (f, _) = read_input(input, g)?;
            let d = match degree {
                Some(d) => *d,
                None => f.canonical_weights()?.degree,
            };
            let reduced = zeta::reduced_zeta(&f)?;
            let dual = reduced.saito_dual(d)?;
            let json = json!({ "degree": d, "reduced_zeta": reduced, "saito_dual": dual });
            let fields = [
                ("degree", Field::Text(d.to_string())),
                ("reduced zeta", Field::Zeta(Some(reduced))),
                ("Saito dual", Field::Zeta(Some(dual))),
            ];
            Ok(Output::ok(render_fields(&fields, json, fmt)?))
        }
        Command::Verify { check } => verify(check, g),
        Command::Scan(args) => {
            let shapes = ShapeFilter {
                chain: args.shapes.contains(&Shape::Chain),
                loops: args.shapes.contains(&Shape::Loop),
                mixed: args.shapes.contains(&Shape::Mixed),
            };
            let checks = if args.check.is_empty() {
                Check::ALL.to_vec()
            } else {
                args.check.iter().map(|&c| c.into()).collect()
            };
            let config = ScanConfig {
                n: args.n.clone(),
                min_exp: args.min_exp,
                max_exp: args.max_exp,
                shapes,
                checks,
            };
            let r = duality::scan(&config);
            let body = match fmt {
                Format::Json => serde_json::to_string_pretty(&r)? + "\n",
                Format::Text => report::scan_text(&r),
                Format::Csv => report::scan_csv(&r)?,
                Format::Latex => report::scan_latex(&r),
            };
            Ok(Output {
                body,
                passed: r.passed(),
            })
        }
    }
}

fn verify(check: &VerifyCommand, g: &Global) -> anyhow::Result<Output> {
    let fmt = g.format;
    match check {
        VerifyCommand::Theorem1 { input } => {
            let (f, _) = read_input(input, g)?;
            let r = duality::verify_theorem1(&f)?;
            let body = structured(&r, fmt, || {
                let fields = [
                    ("holds", Field::Text(r.holds.to_string())),
                    ("c", Field::Text(r.data.c.to_string())),
                    ("c^T", Field::Text(r.data.c_t.to_string())),
                    ("d", Field::Text(r.data.d.to_string())),
                    (
                        "root of transpose",
                        Field::Zeta(Some(r.root_transpose.clone())),
                    ),
                    ("dual of root", Field::Zeta(Some(r.dual_root.clone()))),
                    ("orders uniform", Field::Text(r.orders_uniform.to_string())),
                    ("realized", Field::Text(r.realized.to_string())),
                ];
                render_fields(&fields, Value::Null, fmt).unwrap_or_default()
            })?;
            Ok(Output {
                body,
                passed: r.holds && r.reduced_specialization != Some(false),
            })
        }
        VerifyCommand::Theorem2 { input } => {
            let (f, _) = read_input(input, g)?;
            let v = duality::classify_theorem2(&f)?;
            let body = structured(&v, fmt, || {
                let flags: Vec<String> = v
                    .exceptional_flags
                    .iter()
                    .filter_map(|x| serde_json::to_value(x).ok()?.as_str().map(str::to_string))
                    .collect();
                let mut fields = vec![
                    ("case", Field::Text(v.case.to_string())),
                    ("c", Field::Text(v.data.c.to_string())),
                    ("c^T", Field::Text(v.data.c_t.to_string())),
                    ("d", Field::Text(v.data.d.to_string())),
                    (
                        "root exists for f",
                        Field::Text(v.root_exists_f.to_string()),
                    ),
                    (
                        "root exists for f^T",
                        Field::Text(v.root_exists_ft.to_string()),
                    ),
                    (
                        "geometric root for f",
                        Field::Text(v.geometric_root_f.to_string()),
                    ),
                    (
                        "geometric root for f^T",
                        Field::Text(v.geometric_root_ft.to_string()),
                    ),
                    ("flags", Field::Text(flags.join(","))),
                    ("statement 1", Field::Text(v.statement1.to_string())),
                    ("statement 2", Field::Text(v.statement2.to_string())),
                    ("statement 3", Field::Text(v.statement3.to_string())),
                ];
                if let Some((a, b)) = &v.witness {
                    fields.push(("witness root", Field::Zeta(Some(a.clone()))));
                    fields.push(("witness dual", Field::Zeta(Some(b.clone()))));
                }
                render_fields(&fields, Value::Null, fmt).unwrap_or_default()
            })?;
            Ok(Output {
                body,
                passed: v.holds(),
            })
        }
        VerifyCommand::Remark2 { input } => {
            let (f, _) = read_input(input, g)?;
            let r = duality::verify_remark2(&f)?;
            let body = structured(&r, fmt, || {
                let mut fields = vec![
                    ("holds", Field::Text(r.holds.to_string())),
                    ("root exists", Field::Text(r.root_exists.to_string())),
                    (
                        "geometric root exists",
                        Field::Text(r.geometric_root_exists.to_string()),
                    ),
                ];
                if let Some((a, b)) = &r.sides {
                    fields.push(("root of transpose", Field::Zeta(Some(a.clone()))));
                    fields.push(("inverse dual of root", Field::Zeta(Some(b.clone()))));
                }
                render_fields(&fields, Value::Null, fmt).unwrap_or_default()
            })?;
            Ok(Output {
                body,
                passed: r.holds,
            })
        }
        VerifyCommand::Orbit { input } => {
            let (f, _) = read_input(input, g)?;
            let w = f.canonical_weights()?;
            let or = duality::orbit_function(&f)?;
            let p = duality::poincare_series(&w);
            let json = json!({ "weights": w, "poincare_series": p, "orbit_function": or });
            let fields = [
                ("weights", Field::Text(w.to_string())),
                ("Poincaré series", Field::Zeta(Some(p))),
                ("orbit function", Field::Zeta(Some(or))),
            ];
            Ok(Output::ok(render_fields(&fields, json, fmt)?))
        }
        VerifyCommand::References => {
            let checks = duality::reference_checks()?;
            let passed = checks
                .iter()
                .all(|c| c.status != duality::ReferenceStatus::Mismatch);
            let body = match fmt {
                Format::Json => serde_json::to_string_pretty(&checks)? + "\n",
                Format::Csv => report::references_csv(&checks)?,
                Format::Text | Format::Latex => report::references_text(&checks),
            };
            Ok(Output { body, passed })
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("BHZETA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // a second initialization only fails if something already built the pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.global.out {
                Some(path) => fs::write(path, &out.body)
                    .with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<UsageError>().is_some()
                || matches!(
                    e.downcast_ref::<bhzeta::Error>(),
                    Some(bhzeta::Error::InvalidInput(_) | bhzeta::Error::PreconditionFailed(_))
                );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
