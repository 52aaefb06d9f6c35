//! Single-polynomial analysis and the text, CSV and LaTeX renderings of
//! analyses and survey reports. JSON goes through serde directly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cyclo::CyclotomicFunction;
use crate::duality::{CheckOutcome, DualData, ReferenceCheck, ScanReport};
use crate::error::{Error, Result};
use crate::geomroot;
use crate::invpoly::{InvertiblePolynomial, WeightSystem};
use crate::zeta::{self, ZetaRoute};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Root degree; defaults to the weight gcd `c`.
    pub k: Option<u64>,
    /// Saito duality degree; defaults to the common degree `d`.
    pub degree: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub polynomial: String,
    pub matrix: Vec<Vec<u64>>,
    pub decomposition: String,
    pub weights: WeightSystem,
    pub milnor: String,
    pub route: ZetaRoute,
    pub zeta: CyclotomicFunction,
    pub reduced_zeta: CyclotomicFunction,
}

impl Side {
    fn new(f: &InvertiblePolynomial) -> Result<Self> {
        let (z, route) = zeta::zeta_with_route(f)?;
        Ok(Side {
            polynomial: f.to_string(),
            matrix: f.matrix().to_vec(),
            decomposition: f.decompose()?.to_string(),
            weights: f.canonical_weights()?,
            milnor: f.milnor_number()?.to_string(),
            route,
            reduced_zeta: z.reduce(),
            zeta: z,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub polynomial: Side,
    pub transpose: Side,
    pub data: DualData,
    pub k: u64,
    pub degree: u64,
    /// Canonical formal root of `ζ̃_f` of degree `k`.
    pub root: Option<CyclotomicFunction>,
    /// Number of solutions of `E m ≡ 1 (mod k)`.
    pub solutions: String,
    /// Reduced zeta of a geometric root of degree `k`, when computable.
    pub geometric_root: Option<CyclotomicFunction>,
    /// `ζ̃*_f` with respect to `degree`.
    pub saito_dual: Option<CyclotomicFunction>,
    pub notes: Vec<String>,
}

pub fn analyze(f: &InvertiblePolynomial, options: &AnalyzeOptions) -> Result<Analysis> {
    let ft = f.transpose();
    let polynomial = Side::new(f)?;
    let transpose = Side::new(&ft)?;
    let data = DualData {
        c: polynomial.weights.gcd,
        c_t: transpose.weights.gcd,
        d: polynomial.weights.degree,
    };
    let k = options.k.unwrap_or(data.c);
    if k == 0 {
        return Err(Error::InvalidInput("root degree must be positive".into()));
    }
    let degree = options.degree.unwrap_or(data.d);
    let mut notes = Vec::new();

    if !f.has_critical_point_at_origin() {
        notes.push("no critical point at the origin".into());
    }
    if polynomial.weights.degree != transpose.weights.degree {
        notes.push(format!(
            "degrees of f and its transpose differ: {} and {}",
            polynomial.weights.degree, transpose.weights.degree
        ));
    }
    let root = polynomial.reduced_zeta.canonical_root(k);
    if root.is_none() {
        notes.push(format!("reduced zeta has no root of degree {k}"));
    }
    let solutions = geomroot::count_solutions(f.matrix(), k).to_string();
    let geometric_root = match geomroot::geometric_root_zeta(f, k) {
        Ok(z) => Some(z.reduce()),
        Err(e @ (Error::NoGeometricRoot { .. } | Error::UnsupportedShape(_))) => {
            notes.push(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    let saito_dual = match polynomial.reduced_zeta.saito_dual(degree) {
        Ok(z) => Some(z),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    Ok(Analysis {
        polynomial,
        transpose,
        data,
        k,
        degree,
        root,
        solutions,
        geometric_root,
        saito_dual,
        notes,
    })
}

fn opt(z: &Option<CyclotomicFunction>) -> String {
    z.as_ref()
        .map_or_else(|| "none".into(), ToString::to_string)
}

fn side_text(out: &mut String, label: &str, s: &Side) {
    let _ = writeln!(out, "{label}: {}", s.polynomial);
    let _ = writeln!(out, "  atoms: {}", s.decomposition);
    let _ = writeln!(out, "  weights: {}  c = {}", s.weights, s.weights.gcd);
    let _ = writeln!(out, "  milnor number: {}", s.milnor);
    let _ = writeln!(out, "  zeta: {}  [{}]", s.zeta, route_name(s.route));
    let _ = writeln!(out, "  reduced zeta: {}", s.reduced_zeta);
}

fn route_name(r: ZetaRoute) -> String {
    serde_json::to_value(r)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn analysis_text(a: &Analysis) -> String {
    let mut out = String::new();
    side_text(&mut out, "f", &a.polynomial);
    side_text(&mut out, "transpose", &a.transpose);
    let _ = writeln!(
        out,
        "c = {}, c^T = {}, d = {}",
        a.data.c, a.data.c_t, a.data.d
    );
    let _ = writeln!(out, "root of degree {}: {}", a.k, opt(&a.root));
    let _ = writeln!(out, "solutions mod {}: {}", a.k, a.solutions);
    let _ = writeln!(out, "geometric root: {}", opt(&a.geometric_root));
    let _ = writeln!(
        out,
        "Saito dual w.r.t. {}: {}",
        a.degree,
        opt(&a.saito_dual)
    );
    for n in &a.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

const ANALYSIS_HEADER: [&str; 12] = [
    "polynomial",
    "atoms",
    "weights",
    "c",
    "transpose",
    "transpose_weights",
    "c_t",
    "d",
    "milnor",
    "reduced_zeta",
    "root",
    "geometric_root",
];

pub fn analysis_csv(a: &Analysis) -> Result<String> {
    let p = &a.polynomial;
    let t = &a.transpose;
    let row = [
        p.polynomial.clone(),
        p.decomposition.clone(),
        p.weights.to_string(),
        a.data.c.to_string(),
        t.polynomial.clone(),
        t.weights.to_string(),
        a.data.c_t.to_string(),
        a.data.d.to_string(),
        p.milnor.clone(),
        p.reduced_zeta.to_string(),
        opt(&a.root),
        opt(&a.geometric_root),
    ];
    write_csv(&ANALYSIS_HEADER, std::iter::once(row.to_vec()))
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidInput(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn latex_poly(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '*' => {}
            '^' => {
                let mut exp = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    exp.push(*d);
                    chars.next();
                }
                let _ = write!(out, "^{{{exp}}}");
            }
            c if c.is_ascii_digit() && out.ends_with(|p: char| p.is_ascii_alphabetic()) => {
                out.push_str("_{");
                out.push(c);
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    out.push(*d);
                    chars.next();
                }
                out.push('}');
            }
            c => out.push(c),
        }
    }
    out
}

fn latex_weights(w: &WeightSystem) -> String {
    let ws: Vec<String> = w.weights.iter().map(u64::to_string).collect();
    format!("({}; {})", ws.join(","), w.degree)
}

fn latex_opt(z: &Option<CyclotomicFunction>) -> String {
    z.as_ref()
        .map_or_else(|| "--".into(), |z| format!("${}$", z.to_latex()))
}

pub fn analysis_latex(a: &Analysis) -> String {
    let mut out = String::from("\\begin{tabular}{ll}\n");
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "{k} & {v} \\\\");
    };
    row("$f$", format!("${}$", latex_poly(&a.polynomial.polynomial)));
    row(
        "weights",
        format!(
            "${}$, $c = {}$",
            latex_weights(&a.polynomial.weights),
            a.data.c
        ),
    );
    row(
        "$f^T$",
        format!("${}$", latex_poly(&a.transpose.polynomial)),
    );
    row(
        "weights of $f^T$",
        format!(
            "${}$, $c^T = {}$",
            latex_weights(&a.transpose.weights),
            a.data.c_t
        ),
    );
    row("$\\mu$", a.polynomial.milnor.clone());
    row(
        "$\\widetilde{\\zeta}_f$",
        format!("${}$", a.polynomial.reduced_zeta.to_latex()),
    );
    row(
        "$\\widetilde{\\zeta}_{f^T}$",
        format!("${}$", a.transpose.reduced_zeta.to_latex()),
    );
    row(
        &format!("$\\widetilde{{\\zeta}}_f^{{(1/{})}}$", a.k),
        latex_opt(&a.root),
    );
    row("geometric root", latex_opt(&a.geometric_root));
    row(
        &format!("$\\widetilde{{\\zeta}}_f^*$ ($d = {}$)", a.degree),
        latex_opt(&a.saito_dual),
    );
    out.push_str("\\end{tabular}\n");
    out
}

fn outcome_name(o: &CheckOutcome) -> String {
    let v = serde_json::to_value(o).unwrap_or_default();
    match o {
        CheckOutcome::Error { name, .. } => serde_json::to_value(name)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string)),
        _ => v.get("check").and_then(|c| c.as_str()).map(str::to_string),
    }
    .unwrap_or_default()
}

fn outcome_detail(o: &CheckOutcome) -> String {
    match o {
        CheckOutcome::Theorem1(r) => format!("{} = {}", r.root_transpose, r.dual_root),
        CheckOutcome::Theorem2(v) => {
            let flags: Vec<String> = v
                .exceptional_flags
                .iter()
                .filter_map(|f| {
                    serde_json::to_value(f)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                })
                .collect();
            format!(
                "{} s1={} s2={} s3={} flags=[{}]",
                v.case,
                v.statement1,
                v.statement2,
                v.statement3,
                flags.join(",")
            )
        }
        CheckOutcome::Remark2(r) => format!(
            "root={} geometric={}",
            r.root_exists, r.geometric_root_exists
        ),
        CheckOutcome::Oracle { route, zeta } => format!("{zeta} [{route}]"),
        CheckOutcome::Milnor {
            milnor,
            signed_degree,
            ..
        } => format!("mu={milnor} degree={signed_degree}"),
        CheckOutcome::Error { message, .. } => message.clone(),
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn scan_text(r: &ScanReport) -> String {
    let mut out = String::new();
    for rec in &r.records {
        for o in &rec.outcomes {
            let _ = writeln!(
                out,
                "{:<4} {:<9} {}  {}",
                status(o.passed()),
                outcome_name(o),
                rec.polynomial,
                outcome_detail(o)
            );
        }
    }
    let _ = writeln!(out, "instances: {}", r.summary.instances);
    for (name, checked) in &r.summary.checked {
        let failed = r.summary.failed.get(name).copied().unwrap_or(0);
        let _ = writeln!(out, "{name}: {checked} checked, {failed} failed");
    }
    out
}

pub fn scan_csv(r: &ScanReport) -> Result<String> {
    let rows = r.records.iter().flat_map(|rec| {
        rec.outcomes.iter().map(move |o| {
            vec![
                rec.polynomial.clone(),
                rec.weights
                    .as_ref()
                    .map(ToString::to_string)
                    .unwrap_or_default(),
                outcome_name(o),
                status(o.passed()).to_lowercase(),
                outcome_detail(o),
            ]
        })
    });
    write_csv(
        &["polynomial", "weights", "check", "status", "detail"],
        rows,
    )
}

pub fn scan_latex(r: &ScanReport) -> String {
    let mut out =
        String::from("\\begin{tabular}{llll}\n$f$ & weights & check & status \\\\\n\\hline\n");
    for rec in &r.records {
        let w = rec.weights.as_ref().map(latex_weights).unwrap_or_default();
        for o in &rec.outcomes {
            let _ = writeln!(
                out,
                "${}$ & ${}$ & {} & {} \\\\",
                latex_poly(&rec.polynomial),
                w,
                outcome_name(o),
                status(o.passed())
            );
        }
    }
    out.push_str("\\end{tabular}\n");
    out
}

pub fn references_text(checks: &[ReferenceCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        let tag = serde_json::to_value(c.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{tag:<9} {}: expected {}, computed {}",
            c.name, c.expected, c.computed
        );
        if let Some(n) = &c.note {
            let _ = writeln!(out, "          note: {n}");
        }
    }
    out
}

pub fn references_csv(checks: &[ReferenceCheck]) -> Result<String> {
    let rows = checks.iter().map(|c| {
        let tag = serde_json::to_value(c.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        vec![
            c.name.clone(),
            c.expected.clone(),
            c.computed.clone(),
            tag,
            c.note.clone().unwrap_or_default(),
        ]
    });
    write_csv(&["name", "expected", "computed", "status", "note"], rows)
}
