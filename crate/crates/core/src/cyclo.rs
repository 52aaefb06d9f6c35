//! Rational functions of the form `∏ (1 - t^m)^{s_m}`.
//!
//! Every zeta function, Poincaré series and orbit function in this crate is
//! a [`CyclotomicFunction`]. Values are kept in a canonical sparse form (a
//! map from period `m` to a nonzero exponent `s_m`), so structural equality
//! is equality of rational functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclotomicFunction {
    support: BTreeMap<u64, BigInt>,
}

impl CyclotomicFunction {
    /// The constant function 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// `(1 - t^period)^exponent`.
    pub fn binomial(period: u64, exponent: impl Into<BigInt>) -> Self {
        Self::from_pairs([(period, exponent.into())])
    }

    /// Builds a value from `(period, exponent)` pairs, summing repeated
    /// periods and dropping zero exponents.
    ///
    /// Panics if a period is zero.
    pub fn from_pairs<I, E>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (u64, E)>,
        E: Into<BigInt>,
    {
        let mut out = Self::one();
        for (m, s) in pairs {
            out.add_factor(m, s.into());
        }
        out
    }

    fn add_factor(&mut self, period: u64, exponent: BigInt) {
        assert!(period >= 1, "periods of (1 - t^m) factors start at 1");
        if exponent.is_zero() {
            return;
        }
        let entry = self.support.entry(period).or_insert_with(BigInt::zero);
        *entry += exponent;
        if entry.is_zero() {
            self.support.remove(&period);
        }
    }

    pub fn support(&self) -> &BTreeMap<u64, BigInt> {
        &self.support
    }

    pub fn exponent(&self, period: u64) -> BigInt {
        self.support.get(&period).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.support.is_empty()
    }

    pub fn periods(&self) -> impl Iterator<Item = u64> + '_ {
        self.support.keys().copied()
    }

    /// Sorted `(period, exponent)` pairs.
    pub fn pairs(&self) -> Vec<(u64, BigInt)> {
        self.support.iter().map(|(m, s)| (*m, s.clone())).collect()
    }

    /// Largest absolute exponent, 0 for the constant 1.
    pub fn max_abs_exponent(&self) -> BigInt {
        self.support
            .values()
            .map(|s| s.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn inverse(&self) -> Self {
        self.powi(-1)
    }

    /// Ordinary integer power in the multiplicative group.
    pub fn powi(&self, e: i64) -> Self {
        let e = BigInt::from(e);
        Self::from_pairs(self.support.iter().map(|(m, s)| (*m, s * &e)))
    }

    /// Divides by `(1 - t)`.
    pub fn reduce(&self) -> Self {
        self * &Self::binomial(1, -1)
    }

    /// Multiplies by `(1 - t)`; inverse of [`reduce`](Self::reduce).
    pub fn unreduce(&self) -> Self {
        self * &Self::binomial(1, 1)
    }

    /// `Σ m · s_m`, the degree of the rational function.
    pub fn char_degree(&self) -> BigInt {
        self.support.iter().map(|(m, s)| s * BigInt::from(*m)).sum()
    }

    /// Taylor coefficients at `t = 0` of degrees `0..=order`.
    pub fn series_expand(&self, order: usize) -> Vec<BigInt> {
        let mut coeffs = vec![BigInt::zero(); order + 1];
        coeffs[0] = BigInt::one();
        for (&m, s) in &self.support {
            let m = m as usize;
            if m > order {
                continue;
            }
            let times = s
                .abs()
                .to_usize()
                .expect("exponent too large for a series expansion");
            for _ in 0..times {
                if s.is_positive() {
                    // multiply by (1 - t^m)
                    for j in (m..=order).rev() {
                        let lower = coeffs[j - m].clone();
                        coeffs[j] -= lower;
                    }
                } else {
                    // divide by (1 - t^m)
                    for j in m..=order {
                        let lower = coeffs[j - m].clone();
                        coeffs[j] += lower;
                    }
                }
            }
        }
        coeffs
    }

    /// Saito dual with respect to `degree`: `(1 - t^m)^s ↦ (1 - t^{d/m})^{-s}`.
    pub fn saito_dual(&self, degree: u64) -> Result<Self> {
        let mut out = Self::one();
        for (&m, s) in &self.support {
            if degree == 0 || !degree.is_multiple_of(m) {
                return Err(Error::NonDivisorPeriod { period: m, degree });
            }
            out.add_factor(degree / m, -s);
        }
        Ok(out)
    }

    /// The zeta function of the `k`-th iterate:
    /// `(1 - t^m)^s ↦ (1 - t^{m/g})^{g s}` with `g = gcd(m, k)`.
    pub fn power(&self, k: u64) -> Self {
        assert!(k >= 1, "power degree must be positive");
        let mut out = Self::one();
        for (&m, s) in &self.support {
            let g = m.gcd(&k);
            out.add_factor(m / g, s * BigInt::from(g));
        }
        out
    }

    /// Whether some `ψ` with `ψ.power(k) == self` exists.
    pub fn root_exists(&self, k: u64) -> bool {
        self.support.iter().all(|(&m, s)| {
            let g = root_steps(m, k)
                .into_iter()
                .fold(0u64, |acc, g| acc.gcd(&g));
            (s % BigInt::from(g)).is_zero()
        })
    }

    /// All roots of degree `k` whose periods map onto the support of `self`
    /// and whose exponents are bounded by `bound` in absolute value.
    ///
    /// The result is sorted. Its size grows quickly with `bound` and with the
    /// number of divisors of `k`.
    pub fn enumerate_roots(&self, k: u64, bound: u64) -> Vec<Self> {
        let mut per_target: Vec<(u64, Vec<u64>, Vec<Vec<i64>>)> = Vec::new();
        for (&m, s) in &self.support {
            let steps = root_steps(m, k);
            let Some(s) = s.to_i64() else {
                return Vec::new();
            };
            let sols = bounded_solutions(&steps, s, bound as i64);
            if sols.is_empty() {
                return Vec::new();
            }
            per_target.push((m, steps, sols));
        }
        let mut out = vec![Self::one()];
        for (m, steps, sols) in &per_target {
            let mut next = Vec::with_capacity(out.len() * sols.len());
            for base in &out {
                for r in sols {
                    let mut psi = base.clone();
                    for (g, e) in steps.iter().zip(r) {
                        psi.add_factor(m * g, BigInt::from(*e));
                    }
                    next.push(psi);
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        debug_assert!(out.iter().all(|psi| psi.power(k) == *self));
        out
    }

    /// A deterministic root of degree `k`, or `None` when no root exists.
    ///
    /// Among roots whose periods map onto the support of `self`, picks one
    /// with the least total `Σ |r|` of exponents; ties go to the smaller
    /// exponent at the smallest period where candidates differ.
    pub fn canonical_root(&self, k: u64) -> Option<Self> {
        if !self.root_exists(k) {
            return None;
        }
        let mut root = Self::one();
        for (&m, s) in &self.support {
            let steps = root_steps(m, k);
            let r = least_solution(&steps, s);
            for (g, e) in steps.iter().zip(r) {
                root.add_factor(m * g, e);
            }
        }
        debug_assert_eq!(root.power(k), *self);
        Some(root)
    }

    /// LaTeX fraction, e.g. `\frac{(1-t^{5})(1-t^{60})}{(1-t)(1-t^{20})}`.
    pub fn to_latex(&self) -> String {
        let render = |pairs: &[(u64, BigInt)]| -> String {
            if pairs.is_empty() {
                return "1".to_string();
            }
            pairs
                .iter()
                .map(|(m, s)| {
                    let base = if *m == 1 {
                        "(1-t)".to_string()
                    } else {
                        format!("(1-t^{{{m}}})")
                    };
                    if s.is_one() {
                        base
                    } else {
                        format!("{base}^{{{s}}}")
                    }
                })
                .collect()
        };
        let (num, den) = self.split();
        if den.is_empty() {
            render(&num)
        } else {
            format!("\\frac{{{}}}{{{}}}", render(&num), render(&den))
        }
    }

    /// Numerator and denominator factors with positive exponents.
    fn split(&self) -> (Vec<(u64, BigInt)>, Vec<(u64, BigInt)>) {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (&m, s) in &self.support {
            if s.is_positive() {
                num.push((m, s.clone()));
            } else {
                den.push((m, -s));
            }
        }
        (num, den)
    }
}

/// The multipliers `g` such that a factor of period `m·g` lands on period `m`
/// under the `k`-th power map, i.e. `g | k` and `gcd(m, k/g) = 1`.
/// A factor `(1 - t^{m g})^r` contributes `(1 - t^m)^{g r}`.
pub fn root_steps(m: u64, k: u64) -> Vec<u64> {
    (1..=k)
        .filter(|g| k.is_multiple_of(*g) && m.gcd(&(k / g)) == 1)
        .collect()
}

/// All `r` with `Σ steps[i]·r[i] = target` and `|r[i]| <= bound`.
fn bounded_solutions(steps: &[u64], target: i64, bound: i64) -> Vec<Vec<i64>> {
    fn go(steps: &[u64], target: i64, bound: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        match steps {
            [] => {
                if target == 0 {
                    out.push(acc.clone());
                }
            }
            [last] => {
                let g = *last as i64;
                if target % g == 0 && (target / g).abs() <= bound {
                    acc.push(target / g);
                    out.push(acc.clone());
                    acc.pop();
                }
            }
            [g, rest @ ..] => {
                let reach = bound * rest.iter().map(|&x| x as i64).sum::<i64>();
                for r in -bound..=bound {
                    let left = target - r * (*g as i64);
                    if left.abs() > reach {
                        continue;
                    }
                    acc.push(r);
                    go(rest, left, bound, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(steps, target, bound, &mut Vec::new(), &mut out);
    out
}

/// Solution of `Σ steps[i]·r[i] = target` with the least `Σ |r[i]|`, ties
/// broken by the lexicographically smallest vector. A solution must exist.
fn least_solution(steps: &[u64], target: &BigInt) -> Vec<BigInt> {
    let max_step = *steps.iter().max().expect("k is a root step");
    let lower = (target.abs() + BigInt::from(max_step - 1)) / BigInt::from(max_step);
    let mut budget = lower
        .to_i64()
        .expect("exponent too large for a root search");
    let target = target
        .to_i64()
        .expect("exponent too large for a root search");
    loop {
        let mut best: Option<Vec<i64>> = None;
        let mut acc = Vec::with_capacity(steps.len());
        least_search(steps, target, budget, &mut acc, &mut best);
        if let Some(r) = best {
            return r.into_iter().map(BigInt::from).collect();
        }
        budget += 1;
    }
}

// Visits candidates in lexicographic order, so the first hit at a given
// budget is the tie-break winner; a smaller budget has already failed.
fn least_search(
    steps: &[u64],
    target: i64,
    budget: i64,
    acc: &mut Vec<i64>,
    best: &mut Option<Vec<i64>>,
) {
    if best.is_some() {
        return;
    }
    match steps {
        [] => {
            if target == 0 && budget == 0 {
                *best = Some(acc.clone());
            }
        }
        [g, rest @ ..] => {
            let max_rest = rest.iter().copied().max().unwrap_or(0) as i64;
            for r in -budget..=budget {
                let left = target - r * (*g as i64);
                let left_budget = budget - r.abs();
                if left.abs() > left_budget * max_rest {
                    continue;
                }
                if rest.is_empty() && left != 0 {
                    continue;
                }
                acc.push(r);
                least_search(rest, left, left_budget, acc, best);
                acc.pop();
                if best.is_some() {
                    return;
                }
            }
        }
    }
}

impl Mul for &CyclotomicFunction {
    type Output = CyclotomicFunction;

    fn mul(self, rhs: Self) -> CyclotomicFunction {
        let mut out = self.clone();
        for (&m, s) in &rhs.support {
            out.add_factor(m, s.clone());
        }
        out
    }
}

impl Mul for CyclotomicFunction {
    type Output = CyclotomicFunction;

    fn mul(self, rhs: Self) -> CyclotomicFunction {
        &self * &rhs
    }
}

impl Div for &CyclotomicFunction {
    type Output = CyclotomicFunction;

    fn div(self, rhs: Self) -> CyclotomicFunction {
        self * &rhs.inverse()
    }
}

impl Div for CyclotomicFunction {
    type Output = CyclotomicFunction;

    fn div(self, rhs: Self) -> CyclotomicFunction {
        &self / &rhs
    }
}

impl fmt::Display for CyclotomicFunction {
    /// `(1-t^5)(1-t^60) / ((1-t)(1-t^20))`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |pairs: &[(u64, BigInt)]| -> String {
            pairs
                .iter()
                .map(|(m, s)| {
                    let base = if *m == 1 {
                        "(1-t)".to_string()
                    } else {
                        format!("(1-t^{m})")
                    };
                    if s.is_one() {
                        base
                    } else {
                        format!("{base}^{s}")
                    }
                })
                .collect()
        };
        let (num, den) = self.split();
        let num_s = if num.is_empty() {
            "1".to_string()
        } else {
            render(&num)
        };
        match den.len() {
            0 => write!(f, "{num_s}"),
            1 if den[0].1.is_one() => write!(f, "{num_s} / {}", render(&den)),
            _ => write!(f, "{num_s} / ({})", render(&den)),
        }
    }
}

impl fmt::Debug for CyclotomicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.support.iter()).finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Small(i64),
    Big(String),
}

impl Serialize for CyclotomicFunction {
    /// Ascending list of `[m, s_m]` pairs.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(u64, Exponent)> = self
            .support
            .iter()
            .map(|(m, s)| {
                let e = s
                    .to_i64()
                    .map(Exponent::Small)
                    .unwrap_or_else(|| Exponent::Big(s.to_string()));
                (*m, e)
            })
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let pairs = Vec::<(u64, Exponent)>::deserialize(deserializer)?;
        let mut out = Self::one();
        for (m, e) in pairs {
            if m == 0 {
                return Err(D::Error::custom("period 0 is not allowed"));
            }
            let s = match e {
                Exponent::Small(s) => BigInt::from(s),
                Exponent::Big(text) => text.parse().map_err(D::Error::custom)?,
            };
            out.add_factor(m, s);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(pairs: &[(u64, i64)]) -> CyclotomicFunction {
        CyclotomicFunction::from_pairs(pairs.iter().copied())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn mul_cancels_and_merges() {
        assert!((cf(&[(5, 1)]) * cf(&[(5, -1)])).is_one());
        assert_eq!(cf(&[(5, 1)]) * cf(&[(15, 4)]), cf(&[(5, 1), (15, 4)]));
        let assembled = cf(&[(5, 1)]) * cf(&[(15, 4)]) * cf(&[(5, -4)]) * cf(&[(1, -1)]);
        assert_eq!(assembled, cf(&[(1, -1), (5, -3), (15, 4)]));
    }

    #[test]
    fn series_of_small_values() {
        assert_eq!(
            CyclotomicFunction::one().series_expand(3),
            ints(&[1, 0, 0, 0])
        );
        assert_eq!(cf(&[(1, -1)]).series_expand(4), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(
            cf(&[(3, 1), (1, -1)]).series_expand(4),
            ints(&[1, 1, 1, 0, 0])
        );
    }

    #[test]
    fn saito_dual_examples() {
        assert_eq!(cf(&[(12, 1)]).saito_dual(12).unwrap(), cf(&[(1, -1)]));
        let root_f = cf(&[(5, 1), (60, 1), (20, -1), (1, -1)]);
        let root_ft = cf(&[(3, 1), (60, 1), (12, -1), (1, -1)]);
        assert_eq!(root_f.saito_dual(60).unwrap(), root_ft);
        let phi = cf(&[(2, 1), (6, -1)]);
        assert_eq!(phi.saito_dual(12).unwrap().saito_dual(12).unwrap(), phi);
        assert_eq!(
            cf(&[(5, 1)]).saito_dual(12),
            Err(Error::NonDivisorPeriod {
                period: 5,
                degree: 12
            })
        );
    }

    #[test]
    fn power_examples() {
        assert_eq!(cf(&[(60, 1)]).power(4), cf(&[(15, 4)]));
        let phi = cf(&[(6, 2), (4, -1)]);
        assert_eq!(phi.power(1), phi);
        assert_eq!(phi.power(6), cf(&[(1, 12), (2, -2)]));
    }

    #[test]
    fn root_steps_match_the_power_map() {
        for m in 1..20u64 {
            for k in 1..13u64 {
                for g in root_steps(m, k) {
                    assert_eq!(cf(&[(m * g, 1)]).power(k), cf(&[(m, g as i64)]));
                }
            }
        }
        assert_eq!(root_steps(3, 2), vec![1, 2]);
        assert_eq!(root_steps(5, 10), vec![5, 10]);
    }

    #[test]
    fn root_existence_examples() {
        let zeta_red = cf(&[(1, -1), (5, -3), (15, 4)]);
        assert!(zeta_red.root_exists(4));
        assert!(!cf(&[(5, 2 - 5)]).root_exists(5));
        assert!(cf(&[(7, 3), (2, -5)]).root_exists(1));
    }

    #[test]
    fn enumerated_roots_contain_both_published_roots() {
        let zeta_red = cf(&[(1, -1), (5, -3), (15, 4)]);
        let roots = zeta_red.enumerate_roots(4, 4);
        assert!(roots.contains(&cf(&[(5, 1), (60, 1), (20, -1), (1, -1)])));
        assert!(roots.contains(&cf(&[(60, 1), (5, -3), (1, -1)])));
        assert!(roots.iter().all(|r| r.power(4) == zeta_red));
        assert_eq!(
            CyclotomicFunction::one().enumerate_roots(6, 3),
            vec![CyclotomicFunction::one()]
        );
    }

    #[test]
    fn canonical_root_examples() {
        assert_eq!(cf(&[(3, 2)]).canonical_root(2), Some(cf(&[(6, 1)])));
        let phi = cf(&[(5, 5), (1, -1)]);
        assert_eq!(phi.canonical_root(1), Some(phi.clone()));
        assert_eq!(phi.canonical_root(10), Some(cf(&[(25, 1), (1, -1)])));
        assert_eq!(cf(&[(5, -3)]).canonical_root(5), None);
    }

    #[test]
    fn canonical_root_breaks_ties_at_the_smallest_period() {
        // r5 + 2 r10 + 4 r20 = -3 has two solutions of size 2; the one with
        // the smaller exponent at period 5 wins.
        assert_eq!(
            cf(&[(5, -3)]).canonical_root(4),
            Some(cf(&[(5, -1), (10, -1)]))
        );
    }

    #[test]
    fn reduce_and_degree() {
        assert_eq!(cf(&[(7, 1)]).reduce(), cf(&[(7, 1), (1, -1)]));
        assert!(cf(&[(1, 1)]).reduce().is_one());
        let zeta = cf(&[(5, -3), (15, 4)]);
        assert_eq!(zeta.reduce(), cf(&[(1, -1), (5, -3), (15, 4)]));
        assert_eq!(zeta.reduce().char_degree(), BigInt::from(44));
        assert_eq!(CyclotomicFunction::one().char_degree(), BigInt::from(0));
        assert_eq!(cf(&[(9, 1), (1, -1)]).char_degree(), BigInt::from(8));
    }

    #[test]
    fn serializes_as_sorted_pairs() {
        let phi = cf(&[(15, 4), (1, -1), (5, -3)]);
        let json = serde_json::to_string(&phi).unwrap();
        assert_eq!(json, "[[1,-1],[5,-3],[15,4]]");
        let back: CyclotomicFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, phi);
        let big = CyclotomicFunction::binomial(2, BigInt::from(i64::MAX) * 4);
        let back: CyclotomicFunction =
            serde_json::from_str(&serde_json::to_string(&big).unwrap()).unwrap();
        assert_eq!(back, big);
        assert!(serde_json::from_str::<CyclotomicFunction>("[[0,1]]").is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(
            cf(&[(5, 1), (60, 1), (20, -1), (1, -1)]).to_string(),
            "(1-t^5)(1-t^60) / ((1-t)(1-t^20))"
        );
        assert_eq!(cf(&[(3, 1), (1, -1)]).to_string(), "(1-t^3) / (1-t)");
        assert_eq!(CyclotomicFunction::one().to_string(), "1");
        assert_eq!(cf(&[(2, -2)]).to_string(), "1 / ((1-t^2)^2)");
        assert_eq!(
            cf(&[(15, 4), (1, -1)]).to_latex(),
            "\\frac{(1-t^{15})^{4}}{(1-t)}"
        );
    }
}
