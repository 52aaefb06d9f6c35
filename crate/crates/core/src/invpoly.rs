//! Invertible polynomials: parsing, canonical weights, the Berglund–Hübsch
//! transpose and the chain/loop decomposition.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat;

/// `f = Σ_i ∏_j x_j^{E_ij}` with all coefficients normalized to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InvertiblePolynomial {
    matrix: Vec<Vec<u64>>,
    names: Vec<String>,
}

/// Canonical weights `w_i`, degree `d` and `c = gcd(w_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightSystem {
    pub weights: Vec<u64>,
    pub degree: u64,
    pub gcd: u64,
}

impl WeightSystem {
    pub fn new(weights: Vec<u64>, degree: u64) -> Self {
        let gcd = weights.iter().fold(0u64, |acc, w| acc.gcd(w));
        Self {
            weights,
            degree,
            gcd,
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.gcd == 1
    }

    pub fn reduced(&self) -> Self {
        let c = self.gcd.max(1);
        Self::new(
            self.weights.iter().map(|w| w / c).collect(),
            self.degree / c,
        )
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(u64::to_string).collect();
        write!(f, "({}; {})", w.join(","), self.degree)
    }
}

/// One summand of the chain/loop decomposition. `variables[i]` is the
/// column carrying exponent `exponents[i]`, listed in chain (or loop) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Atom {
    /// `x_1^{p_1} x_2 + … + x_{m-1}^{p_{m-1}} x_m + x_m^{p_m}`
    Chain {
        exponents: Vec<u64>,
        variables: Vec<usize>,
    },
    /// `x_1^{p_1} x_2 + … + x_{m-1}^{p_{m-1}} x_m + x_m^{p_m} x_1`
    Loop {
        exponents: Vec<u64>,
        variables: Vec<usize>,
    },
}

impl Atom {
    pub fn exponents(&self) -> &[u64] {
        match self {
            Atom::Chain { exponents, .. } | Atom::Loop { exponents, .. } => exponents,
        }
    }

    pub fn variables(&self) -> &[usize] {
        match self {
            Atom::Chain { variables, .. } | Atom::Loop { variables, .. } => variables,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents().len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents().is_empty()
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, Atom::Loop { .. })
    }

    /// Exponent matrix of the atom alone, rows and columns in atom order.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let p = self.exponents();
        let n = p.len();
        let mut e = vec![vec![0u64; n]; n];
        for i in 0..n {
            e[i][i] = p[i];
            if i + 1 < n {
                e[i][i + 1] = 1;
            }
        }
        if self.is_loop() {
            e[n - 1][0] = 1;
        }
        e
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.exponents().iter().map(u64::to_string).collect();
        let kind = if self.is_loop() { "loop" } else { "chain" };
        write!(f, "{kind}({})", p.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AtomicDecomposition {
    pub atoms: Vec<Atom>,
}

impl AtomicDecomposition {
    /// The single atom, if the polynomial is of pure chain or loop type.
    pub fn single(&self) -> Option<&Atom> {
        match self.atoms.as_slice() {
            [a] => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for AtomicDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(Atom::to_string).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl InvertiblePolynomial {
    /// Builds a polynomial from its exponent matrix. `names` defaults to
    /// `x1, …, xn`.
    pub fn from_matrix(matrix: Vec<Vec<u64>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = matrix.len();
        let names = names.unwrap_or_else(|| (1..=n).map(|i| format!("x{i}")).collect());
        if names.len() != n {
            return Err(Error::NotSquare {
                monomials: n,
                variables: names.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                monomials: n,
                variables: row.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|x| !seen.insert(*x)) {
            return Err(Error::InvalidInput(format!("variable {dup} listed twice")));
        }
        if n == 0 {
            return Err(Error::InvalidInput("empty polynomial".into()));
        }
        let poly = Self { matrix, names };
        if poly.determinant().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(poly)
    }

    /// Parses `{"matrix": [[…]], "names": […]}`; `names` is optional.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct MatrixInput {
            matrix: Vec<Vec<u64>>,
            names: Option<Vec<String>>,
        }
        let input: MatrixInput =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::from_matrix(input.matrix, input.names)
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn determinant(&self) -> BigInt {
        intmat::determinant(&intmat::from_u64(&self.matrix))
    }

    /// Cramer weights: `w_i = det(E with column i replaced by 1)`,
    /// `d = det E`, sign-normalized so that `d > 0`.
    pub fn canonical_weights(&self) -> Result<WeightSystem> {
        let e = intmat::from_u64(&self.matrix);
        let det = intmat::determinant(&e);
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let sign = if det.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let mut weights = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let mut ei = e.clone();
            for row in ei.iter_mut() {
                row[i] = BigInt::one();
            }
            let w = intmat::determinant(&ei) * &sign;
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight {
                    index: i,
                    weight: w.to_string(),
                });
            }
            weights.push(
                w.to_u64()
                    .ok_or_else(|| Error::InvalidInput(format!("weight {w} exceeds 64 bits")))?,
            );
        }
        let degree = (det * sign)
            .to_u64()
            .ok_or_else(|| Error::InvalidInput("degree exceeds 64 bits".into()))?;
        let ws = WeightSystem::new(weights, degree);
        debug_assert!(self.matrix.iter().all(|row| {
            row.iter().zip(&ws.weights).map(|(e, w)| e * w).sum::<u64>() == ws.degree
        }));
        Ok(ws)
    }

    /// The Berglund–Hübsch transpose (exponent matrix `Eᵀ`).
    pub fn transpose(&self) -> Self {
        let n = self.n();
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[j][i]).collect())
            .collect();
        Self {
            matrix,
            names: self.names.clone(),
        }
    }

    /// Splits the polynomial into chain and loop summands in disjoint
    /// variable groups. Atoms are ordered by their smallest variable index.
    pub fn decompose(&self) -> Result<AtomicDecomposition> {
        let n = self.n();
        // candidate "own" variables per monomial
        let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
        for (i, row) in self.matrix.iter().enumerate() {
            let nz: Vec<usize> = (0..n).filter(|&j| row[j] > 0).collect();
            let own = match nz.as_slice() {
                [a] => vec![*a],
                [a, b] => {
                    let mut own = Vec::new();
                    if row[*b] == 1 {
                        own.push(*a);
                    }
                    if row[*a] == 1 {
                        own.push(*b);
                    }
                    own
                }
                _ => Vec::new(),
            };
            if own.is_empty() {
                return Err(Error::NotKreuzerSkarke { row: i });
            }
            candidates.push(own);
        }

        let mut assignment = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut first_bad = None;
        if !self.assign(0, &candidates, &mut assignment, &mut used, &mut first_bad) {
            return Err(Error::NotKreuzerSkarke {
                row: first_bad.unwrap_or(0),
            });
        }

        // pointer from a monomial's own variable to its extra variable
        let mut next: Vec<Option<usize>> = vec![None; n];
        let mut exponent = vec![0u64; n];
        for (i, &own) in assignment.iter().enumerate() {
            exponent[own] = self.matrix[i][own];
            next[own] = (0..n).find(|&j| j != own && self.matrix[i][j] > 0);
        }
        let mut has_pred = vec![false; n];
        for t in next.iter().flatten() {
            has_pred[*t] = true;
        }

        let mut atoms = Vec::new();
        let mut visited = vec![false; n];
        for start in 0..n {
            if has_pred[start] || visited[start] {
                continue;
            }
            let mut vars = vec![start];
            visited[start] = true;
            let mut cur = start;
            while let Some(t) = next[cur] {
                vars.push(t);
                visited[t] = true;
                cur = t;
            }
            let exps = vars.iter().map(|&v| exponent[v]).collect();
            atoms.push(Atom::Chain {
                exponents: exps,
                variables: vars,
            });
        }
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut vars = Vec::new();
            let mut cur = start;
            while !visited[cur] {
                visited[cur] = true;
                vars.push(cur);
                cur = next[cur].expect("every variable on a cycle has a successor");
            }
            let exps = vars.iter().map(|&v| exponent[v]).collect();
            atoms.push(Atom::Loop {
                exponents: exps,
                variables: vars,
            });
        }
        atoms.sort_by_key(|a| a.variables().iter().copied().min());
        Ok(AtomicDecomposition { atoms })
    }

    fn assign(
        &self,
        row: usize,
        candidates: &[Vec<usize>],
        assignment: &mut [usize],
        used: &mut [bool],
        first_bad: &mut Option<usize>,
    ) -> bool {
        let n = self.n();
        if row == n {
            // each variable may be the extra variable of at most one monomial
            let mut indegree = vec![0usize; n];
            for (i, &own) in assignment.iter().enumerate() {
                for j in (0..n).filter(|&j| j != own && self.matrix[i][j] > 0) {
                    indegree[j] += 1;
                    if indegree[j] > 1 {
                        first_bad.get_or_insert(i);
                        return false;
                    }
                }
            }
            return true;
        }
        for &v in &candidates[row] {
            if used[v] {
                continue;
            }
            used[v] = true;
            assignment[row] = v;
            if self.assign(row + 1, candidates, assignment, used, first_bad) {
                return true;
            }
            used[v] = false;
        }
        first_bad.get_or_insert(row);
        false
    }

    /// True iff no monomial is a bare variable, i.e. the gradient vanishes
    /// at the origin.
    pub fn has_critical_point_at_origin(&self) -> bool {
        !self.matrix.iter().any(|row| row.iter().sum::<u64>() == 1)
    }

    /// `μ = ∏ (d - w_i) / w_i`; zero when the origin is not critical.
    pub fn milnor_number(&self) -> Result<BigInt> {
        if !self.has_critical_point_at_origin() {
            return Ok(BigInt::zero());
        }
        let ws = self.canonical_weights()?;
        let d = BigInt::from(ws.degree);
        let mu: BigRational = ws
            .weights
            .iter()
            .map(|&w| BigRational::new(&d - BigInt::from(w), BigInt::from(w)))
            .product();
        if !mu.is_integer() {
            return Err(Error::NonIntegralMilnor(mu.to_string()));
        }
        Ok(mu.to_integer())
    }

    /// `x_1^2 + x_2^2 + x_3^p` up to permutation of the variables.
    pub fn is_a_form(&self) -> bool {
        if self.n() != 3 {
            return false;
        }
        let Ok(dec) = self.decompose() else {
            return false;
        };
        dec.atoms.len() == 3
            && dec.atoms.iter().all(|a| !a.is_loop())
            && dec.atoms.iter().filter(|a| a.exponents() == [2]).count() >= 2
    }
}

impl fmt::Display for InvertiblePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .matrix
            .iter()
            .map(|row| {
                let factors: Vec<String> = row
                    .iter()
                    .zip(&self.names)
                    .filter(|(e, _)| **e > 0)
                    .map(|(e, x)| {
                        if *e == 1 {
                            x.clone()
                        } else {
                            format!("{x}^{e}")
                        }
                    })
                    .collect();
                if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors.join("*")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl FromStr for InvertiblePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_polynomial(s, &ParseOptions::default()).map(|p| p.polynomial)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Accept and discard non-unit coefficients.
    pub allow_coefficients: bool,
}

#[derive(Clone, Debug)]
pub struct ParsedPolynomial {
    pub polynomial: InvertiblePolynomial,
    pub warnings: Vec<String>,
}

/// Parses `term (+ term)*` where a term is an optional integer coefficient
/// followed by factors `var(^int)?`, optionally separated by `*`.
/// A variable is a letter followed by digits or underscores, so `x1x2`
/// reads as `x1*x2`.
///
/// Monomials become rows in textual order. Columns follow first appearance,
/// except that names all of the form `x<index>` are ordered by index.
pub fn parse_polynomial(text: &str, options: &ParseOptions) -> Result<ParsedPolynomial> {
    let mut parser = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let mut terms: Vec<Vec<(String, u64)>> = Vec::new();
    let mut warnings = Vec::new();

    parser.skip_ws();
    let mut negative = parser.eat(b'-');
    loop {
        parser.skip_ws();
        let start = parser.pos;
        let (coefficient, factors) = parser.term()?;
        let coefficient = if negative { -coefficient } else { coefficient };
        if coefficient != 1 {
            if !options.allow_coefficients {
                return Err(Error::NonUnitCoefficient {
                    coefficient,
                    position: start,
                });
            }
            warnings.push(format!(
                "coefficient {coefficient} of monomial {} discarded",
                terms.len() + 1
            ));
        }
        terms.push(factors);
        parser.skip_ws();
        if parser.eat(b'+') {
            negative = false;
        } else if parser.eat(b'-') {
            negative = true;
        } else if parser.at_end() {
            break;
        } else {
            return Err(parser.error("expected '+', '-' or end of input"));
        }
    }

    let mut order: Vec<String> = Vec::new();
    for factors in &terms {
        for (name, _) in factors {
            if !order.contains(name) {
                order.push(name.clone());
            }
        }
    }
    let indexed: Option<Vec<u64>> = order
        .iter()
        .map(|x| {
            x.strip_prefix('x').and_then(|d| {
                if d.bytes().all(|b| b.is_ascii_digit()) {
                    d.parse().ok()
                } else {
                    None
                }
            })
        })
        .collect();
    if let Some(idx) = indexed {
        let mut keyed: Vec<(u64, String)> = idx.into_iter().zip(order).collect();
        keyed.sort();
        order = keyed.into_iter().map(|(_, x)| x).collect();
    }
    let column: HashMap<&str, usize> = order
        .iter()
        .enumerate()
        .map(|(j, x)| (x.as_str(), j))
        .collect();

    if terms.len() != order.len() {
        return Err(Error::NotSquare {
            monomials: terms.len(),
            variables: order.len(),
        });
    }
    let mut matrix = vec![vec![0u64; order.len()]; terms.len()];
    for (i, factors) in terms.iter().enumerate() {
        for (name, e) in factors {
            matrix[i][column[name.as_str()]] += e;
        }
    }
    let polynomial = InvertiblePolynomial::from_matrix(matrix, Some(order))?;
    Ok(ParsedPolynomial {
        polynomial,
        warnings,
    })
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Syntax {
                position: start,
                message: "integer out of range".into(),
            })
    }

    fn variable(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.text.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
            return None;
        }
        self.pos += 1;
        while self.pos < self.text.len()
            && (self.text[self.pos].is_ascii_digit() || self.text[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<(i64, Vec<(String, u64)>)> {
        let mut coefficient = 1i64;
        let mut factors = Vec::new();
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let c = self.integer()?;
            coefficient = i64::try_from(c).map_err(|_| self.error("coefficient out of range"))?;
            if !self.eat(b'*') && !self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
                return Ok((coefficient, factors));
            }
        }
        loop {
            let Some(name) = self.variable() else {
                return Err(self.error("expected a variable"));
            };
            let exponent = if self.eat(b'^') { self.integer()? } else { 1 };
            factors.push((name, exponent));
            if self.eat(b'*') {
                continue;
            }
            if !self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
                break;
            }
        }
        Ok((coefficient, factors))
    }
}
