//! Monodromy zeta functions: closed forms per atomic and mixed shape, and an
//! independent oracle computed from the weight system alone.

use std::collections::BTreeMap;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::CyclotomicFunction;
use crate::error::{Error, Result};
use crate::invpoly::{Atom, InvertiblePolynomial, WeightSystem};

fn product(qs: &[u64]) -> u64 {
    qs.iter()
        .try_fold(1u64, |acc, &q| acc.checked_mul(q))
        .expect("exponent product overflows u64")
}

fn gcd_all(xs: &[u64]) -> u64 {
    xs.iter().fold(0, |acc, x| acc.gcd(x))
}

fn sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `⟨q_1,…,q_k⟩ = q_1⋯q_k − ⟨q_2,…,q_k⟩`, with `⟨⟩ = 1`.
pub fn bracket(qs: &[u64]) -> u64 {
    match qs.split_first() {
        None => 1,
        Some((_, rest)) => product(qs) - bracket(rest),
    }
}

/// Weights of `x_1^{p_1}x_2 + … + x_n^{p_n}`:
/// `w_j = p_1⋯p_{j-1}·⟨p_{j+1},…,p_n⟩`, `d = p_1⋯p_n`.
pub fn chain_weights(p: &[u64]) -> WeightSystem {
    assert!(!p.is_empty(), "a chain has at least one variable");
    let weights = (0..p.len())
        .map(|j| product(&p[..j]) * bracket(&p[j + 1..]))
        .collect();
    WeightSystem::new(weights, product(p))
}

/// Weights of `x_1^{p_1}x_2 + … + x_n^{p_n}x_1`:
/// `w_j = ⟨p_{j+1},…,p_n,p_1,…,p_{j-1}⟩`, `d = p_1⋯p_n + (−1)^{n−1}`.
pub fn loop_weights(p: &[u64]) -> WeightSystem {
    assert!(p.len() >= 2, "a loop has at least two variables");
    let n = p.len();
    let weights = (0..n)
        .map(|j| {
            let rotated: Vec<u64> = p[j + 1..].iter().chain(&p[..j]).copied().collect();
            bracket(&rotated)
        })
        .collect();
    let degree = if n % 2 == 1 {
        product(p) + 1
    } else {
        product(p) - 1
    };
    WeightSystem::new(weights, degree)
}

/// `ζ = ∏_j (1 − t^{p_j⋯p_n / c_j})^{(−1)^{n−j} c_j}` where `c_j` is the
/// weight gcd of the subchain `(p_j,…,p_n)`.
pub fn zeta_chain(p: &[u64]) -> CyclotomicFunction {
    let n = p.len();
    let mut z = CyclotomicFunction::one();
    for j in 0..n {
        let sub = &p[j..];
        let cj = chain_weights(sub).gcd;
        let e = sign(n - 1 - j) * cj as i64;
        z = z * CyclotomicFunction::binomial(product(sub) / cj, e);
    }
    z
}

/// `ζ = (1 − t^{d/c})^{(−1)^{n−1} c}`.
pub fn zeta_loop(p: &[u64]) -> CyclotomicFunction {
    let w = loop_weights(p);
    CyclotomicFunction::binomial(w.degree / w.gcd, sign(p.len() - 1) * w.gcd as i64)
}

/// `x_1^{p_1} + x_2^{p_2} + x_3^{p_3}`.
/// Returns the unreduced zeta function.
pub fn zeta_bp3(p1: u64, p2: u64, p3: u64) -> CyclotomicFunction {
    let p = [p1, p2, p3];
    let c = gcd_all(&[p2 * p3, p1 * p3, p1 * p2]);
    let mut pairs: Vec<(u64, i64)> = p.iter().map(|&q| (q, 1)).collect();
    pairs.push((p1 * p2 * p3 / c, c as i64));
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let cij = p[i].gcd(&p[j]);
        pairs.push((p[i] * p[j] / cij, -(cij as i64)));
    }
    CyclotomicFunction::from_pairs(pairs)
}

/// `x_1^{p_1}x_2 + x_2^{p_2}x_1 + x_3^{p_3}`.
pub fn zeta_b3(p1: u64, p2: u64, p3: u64) -> CyclotomicFunction {
    let e = p1 * p2 - 1;
    let c = gcd_all(&[p3 * (p2 - 1), p3 * (p1 - 1), e]);
    let c1 = (p2 - 1).gcd(&(p1 - 1));
    CyclotomicFunction::from_pairs([(p3, 1), (p3 * e / c, c as i64), (e / c1, -(c1 as i64))])
}

/// `x_1^{p_1}x_2 + x_2^{p_2} + x_3^{p_3}`.
pub fn zeta_c3(p1: u64, p2: u64, p3: u64) -> CyclotomicFunction {
    let d = p1 * p2 * p3;
    let c = gcd_all(&[p3 * (p2 - 1), p3 * p1, p1 * p2]);
    let c1 = (p2 - 1).gcd(&p1);
    let c2 = p2.gcd(&p3);
    CyclotomicFunction::from_pairs([
        (p2, 1),
        (p3, 1),
        (d / c, c as i64),
        (p1 * p2 / c1, -(c1 as i64)),
        (p2 * p3 / c2, -(c2 as i64)),
    ])
}

/// Formal combination `Σ a_u Λ_u` with `Λ_a·Λ_b = gcd(a,b)·Λ_{lcm(a,b)}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrlikDivisor {
    terms: BTreeMap<u64, BigRational>,
}

impl OrlikDivisor {
    pub fn one() -> Self {
        Self::lambda(1, BigRational::one())
    }

    /// `coefficient · Λ_order`.
    pub fn lambda(order: u64, coefficient: BigRational) -> Self {
        let mut d = Self::default();
        d.add(order, coefficient);
        d
    }

    fn add(&mut self, order: u64, coefficient: BigRational) {
        if coefficient.is_zero() {
            return;
        }
        let e = self.terms.entry(order).or_insert_with(BigRational::zero);
        *e += coefficient;
        if e.is_zero() {
            self.terms.remove(&order);
        }
    }

    pub fn terms(&self) -> &BTreeMap<u64, BigRational> {
        &self.terms
    }

    /// Integer multiplicities, or the first non-integral one.
    pub fn to_integral(&self) -> Result<BTreeMap<u64, BigInt>> {
        self.terms
            .iter()
            .map(|(&u, a)| {
                if a.is_integer() {
                    Ok((u, a.to_integer()))
                } else {
                    Err(Error::NonIntegralDivisor {
                        order: u,
                        multiplicity: a.to_string(),
                    })
                }
            })
            .collect()
    }

    /// The divisor `Σ s_m Λ_m` of a cyclotomic function.
    pub fn from_cyclotomic(f: &CyclotomicFunction) -> Self {
        let mut d = Self::default();
        for (m, s) in f.support() {
            d.add(*m, BigRational::from_integer(s.clone()));
        }
        d
    }

    /// Reads `Σ a_u Λ_u` back as `∏ (1 − t^u)^{a_u}`.
    pub fn to_cyclotomic(&self) -> Result<CyclotomicFunction> {
        Ok(CyclotomicFunction::from_pairs(self.to_integral()?))
    }
}

impl Mul for &OrlikDivisor {
    type Output = OrlikDivisor;

    fn mul(self, rhs: &OrlikDivisor) -> OrlikDivisor {
        let mut out = OrlikDivisor::default();
        for (&a, x) in &self.terms {
            for (&b, y) in &rhs.terms {
                let g = a.gcd(&b);
                out.add(a / g * b, x * y * BigInt::from(g));
            }
        }
        out
    }
}

impl Sub for &OrlikDivisor {
    type Output = OrlikDivisor;

    fn sub(self, rhs: &OrlikDivisor) -> OrlikDivisor {
        let mut out = self.clone();
        for (&u, a) in &rhs.terms {
            out.add(u, -a);
        }
        out
    }
}

/// Zeta function from weights alone: with `d/w_i = u_i/v_i` in lowest terms,
/// `Div = ∏ ((1/v_i)Λ_{u_i} − Λ_1)` and `ζ = (1−t)·(∏(1−t^u)^{a_u})^{(−1)^{n−1}}`.
pub fn milnor_orlik_zeta(w: &WeightSystem, n: usize) -> Result<CyclotomicFunction> {
    if w.weights.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} weights for {n} variables",
            w.weights.len()
        )));
    }
    let mut div = OrlikDivisor::one();
    for &wi in &w.weights {
        if wi == 0 {
            return Err(Error::NonPositiveWeight {
                index: 0,
                weight: "0".into(),
            });
        }
        let g = w.degree.gcd(&wi);
        let (u, v) = (w.degree / g, wi / g);
        let factor = &OrlikDivisor::lambda(u, BigRational::new(BigInt::one(), BigInt::from(v)))
            - &OrlikDivisor::one();
        div = &div * &factor;
    }
    let core = div.to_cyclotomic()?;
    let core = if n % 2 == 1 { core } else { core.inverse() };
    Ok(core.unreduce())
}

/// Zeta function of a Thom–Sebastiani sum of finite-order maps, given the
/// unreduced zeta function and variable count of each summand. The reduced
/// divisors multiply in the ring of [`OrlikDivisor`].
pub fn thom_sebastiani(parts: &[(CyclotomicFunction, usize)]) -> Result<CyclotomicFunction> {
    let mut div = OrlikDivisor::one();
    let mut n = 0;
    for (z, na) in parts {
        let reduced = z.reduce();
        let reduced = if na % 2 == 1 {
            reduced
        } else {
            reduced.inverse()
        };
        div = &div * &OrlikDivisor::from_cyclotomic(&reduced);
        n += na;
    }
    let core = div.to_cyclotomic()?;
    let core = if n % 2 == 1 { core } else { core.inverse() };
    Ok(core.unreduce())
}

/// Which formula produced a zeta value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaRoute {
    Chain,
    Loop,
    BrieskornPham,
    LoopPlusFermat,
    ChainPlusFermat,
    Oracle,
}

/// The three-variable mixed shapes with a dedicated closed form, as
/// `(route, p1, p2, p3)` in the variable roles of the formulas.
pub(crate) fn mixed_shape(atoms: &[Atom]) -> Option<(ZetaRoute, u64, u64, u64)> {
    let mut atoms: Vec<&Atom> = atoms.iter().collect();
    atoms.sort_by_key(|a| std::cmp::Reverse(a.len()));
    match atoms.as_slice() {
        [a, b, c] if a.len() == 1 && b.len() == 1 && c.len() == 1 => Some((
            ZetaRoute::BrieskornPham,
            a.exponents()[0],
            b.exponents()[0],
            c.exponents()[0],
        )),
        [two, one] if two.len() == 2 && one.len() == 1 => {
            let (p, q) = (two.exponents()[0], two.exponents()[1]);
            let route = if two.is_loop() {
                ZetaRoute::LoopPlusFermat
            } else {
                ZetaRoute::ChainPlusFermat
            };
            Some((route, p, q, one.exponents()[0]))
        }
        _ => None,
    }
}

/// Unreduced monodromy zeta function of `f`, with the formula used.
///
/// Every closed form is cross-checked against [`milnor_orlik_zeta`];
/// disagreement is reported as [`Error::Inconsistent`].
pub fn zeta_with_route(f: &InvertiblePolynomial) -> Result<(CyclotomicFunction, ZetaRoute)> {
    let dec = f.decompose()?;
    let weights = f.canonical_weights()?;
    let oracle = milnor_orlik_zeta(&weights, f.n())?;
    let closed = match dec.single() {
        Some(a @ Atom::Chain { .. }) => Some((zeta_chain(a.exponents()), ZetaRoute::Chain)),
        Some(a @ Atom::Loop { .. }) => Some((zeta_loop(a.exponents()), ZetaRoute::Loop)),
        None if f.n() == 3 => mixed_shape(&dec.atoms).map(|(route, p1, p2, p3)| {
            let z = match route {
                ZetaRoute::BrieskornPham => zeta_bp3(p1, p2, p3),
                ZetaRoute::LoopPlusFermat => zeta_b3(p1, p2, p3),
                _ => zeta_c3(p1, p2, p3),
            };
            (z, route)
        }),
        None => None,
    };
    match closed {
        Some((z, route)) if z == oracle => Ok((z, route)),
        Some((z, route)) => Err(Error::Inconsistent(format!(
            "{route:?} closed form {z} differs from weight oracle {oracle} for {f}"
        ))),
        None => Ok((oracle, ZetaRoute::Oracle)),
    }
}

pub fn zeta(f: &InvertiblePolynomial) -> Result<CyclotomicFunction> {
    zeta_with_route(f).map(|(z, _)| z)
}

/// `ζ̃ = ζ / (1 − t)`.
pub fn reduced_zeta(f: &InvertiblePolynomial) -> Result<CyclotomicFunction> {
    zeta(f).map(|z| z.reduce())
}

/// `(−1)^{n−1}·deg ζ̃`, which equals the Milnor number for an isolated
/// singularity.
pub fn signed_reduced_degree(z: &CyclotomicFunction, n: usize) -> BigInt {
    let deg = z.reduce().char_degree();
    if n % 2 == 1 {
        deg
    } else {
        -deg
    }
}

/// Product `∏ (d − w_i) / w_i` as an exact rational.
pub fn milnor_from_weights(w: &WeightSystem) -> BigRational {
    let d = BigInt::from(w.degree);
    w.weights
        .iter()
        .map(|&wi| BigRational::new(&d - BigInt::from(wi), BigInt::from(wi)))
        .product()
}
