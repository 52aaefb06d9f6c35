//! Geometric roots of the monodromy: diagonal `ℤ_k`-actions `Σ` with
//! `E·m ≡ 1 (mod k)`, the rotation numbers of `ĥ = Σ⁻¹∘Γ_{1/k}`, their
//! orders on coordinate tori, and zeta functions in the closed-form cases.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cyclo::CyclotomicFunction;
use crate::error::{Error, Result};
use crate::intmat;
use crate::invpoly::{Atom, InvertiblePolynomial, WeightSystem};
use crate::zeta;

/// Search spaces up to this size are enumerated directly.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RootAction {
    pub k: u64,
    pub m: Vec<u64>,
}

impl RootAction {
    pub fn satisfies(&self, e: &[Vec<u64>]) -> bool {
        let k = self.k as u128;
        e.iter().all(|row| {
            let s: u128 = row
                .iter()
                .zip(&self.m)
                .map(|(&a, &b)| a as u128 * b as u128 % k)
                .sum();
            s % k == 1 % k
        })
    }
}

impl fmt::Display for RootAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.m.iter().map(u64::to_string).collect();
        write!(f, "k={} m=({})", self.k, m.join(","))
    }
}

/// Rotation numbers `b_j ∈ [0, 1)`: `ĥ(x)_j = exp(2πi b_j) x_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootMap {
    pub b: Vec<BigRational>,
}

impl Serialize for RootMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let b: Vec<String> = self.b.iter().map(BigRational::to_string).collect();
        #[derive(Serialize)]
        struct Repr {
            b: Vec<String>,
        }
        Repr { b }.serialize(s)
    }
}

fn check_k(k: u64) {
    assert!(k >= 1, "root degree must be positive");
}

/// All `m ∈ (ℤ_k)^n` with `E·m ≡ 1 (mod k)`, in lexicographic order.
pub fn solve_congruence(e: &[Vec<u64>], k: u64) -> Vec<RootAction> {
    check_k(k);
    let n = e.len() as u32;
    match k.checked_pow(n) {
        Some(size) if size <= EXHAUSTIVE_LIMIT => solve_exhaustive(e, k),
        _ => solve_elimination(e, k),
    }
}

/// Brute force over `(ℤ_k)^n`, sharded over the first coordinate.
pub fn solve_exhaustive(e: &[Vec<u64>], k: u64) -> Vec<RootAction> {
    check_k(k);
    let n = e.len();
    if n == 0 {
        return vec![RootAction { k, m: Vec::new() }];
    }
    let mut out: Vec<RootAction> = (0..k)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut m = vec![0u64; n];
            m[0] = first;
            loop {
                let action = RootAction { k, m: m.clone() };
                if action.satisfies(e) {
                    found.push(action);
                }
                // odometer over coordinates 1..n
                let mut i = n;
                loop {
                    i -= 1;
                    if i == 0 {
                        return found;
                    }
                    m[i] += 1;
                    if m[i] < k {
                        break;
                    }
                    m[i] = 0;
                }
            }
        })
        .collect();
    out.sort();
    out
}

/// Smith normal form `L·E·R = D` turns the system into independent
/// congruences `D_i y_i ≡ (L·1)_i (mod k)`; solutions map back by `m = R·y`.
pub fn solve_elimination(e: &[Vec<u64>], k: u64) -> Vec<RootAction> {
    check_k(k);
    let n = e.len();
    let modulus = BigInt::from(k);
    let snf = intmat::smith(&intmat::from_u64(e));
    let rhs = intmat::mat_vec(&snf.left, &vec![BigInt::one(); n]);

    // per coordinate: base solution and step, with `g` residues each
    let mut choices: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let d = snf.diag[i].mod_floor(&modulus);
        let b = rhs[i].mod_floor(&modulus);
        let g = d.gcd(&modulus);
        if !(&b % &g).is_zero() {
            return Vec::new();
        }
        if g == modulus {
            // d ≡ 0: any residue works
            choices.push((0..k).map(BigInt::from).collect());
            continue;
        }
        let step = &modulus / &g;
        let d_red = &d / &g;
        let b_red = &b / &g;
        let inv = d_red.extended_gcd(&step).x.mod_floor(&step);
        let y0 = (b_red * inv).mod_floor(&step);
        let count = g.to_u64().expect("gcd is at most k");
        choices.push((0..count).map(|t| &y0 + &step * BigInt::from(t)).collect());
    }

    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let y: Vec<BigInt> = idx
            .iter()
            .zip(&choices)
            .map(|(&i, c)| c[i].clone())
            .collect();
        let m: Vec<u64> = intmat::mat_vec(&snf.right, &y)
            .iter()
            .map(|x| x.mod_floor(&modulus).to_u64().expect("residue below k"))
            .collect();
        out.push(RootAction { k, m });
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                debug_assert!(out.iter().all(|a| a.satisfies(e)));
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Number of solutions of `E·m ≡ 1 (mod k)` without listing them.
pub fn count_solutions(e: &[Vec<u64>], k: u64) -> BigInt {
    check_k(k);
    let modulus = BigInt::from(k);
    let snf = intmat::smith(&intmat::from_u64(e));
    let rhs = intmat::mat_vec(&snf.left, &vec![BigInt::one(); e.len()]);
    let mut count = BigInt::one();
    for (d, b) in snf.diag.iter().zip(&rhs) {
        let g = d.mod_floor(&modulus).gcd(&modulus);
        if !(b.mod_floor(&modulus) % &g).is_zero() {
            return BigInt::zero();
        }
        count *= g;
    }
    count
}

/// For prime `p`: `rank(E mod p) = rank([E | 1] mod p)`.
pub fn rank_criterion(e: &[Vec<u64>], p: u64) -> bool {
    let a: Vec<Vec<i64>> = e
        .iter()
        .map(|r| r.iter().map(|&x| x as i64).collect())
        .collect();
    let aug: Vec<Vec<i64>> = a
        .iter()
        .map(|r| r.iter().copied().chain([1]).collect())
        .collect();
    intmat::rank_mod_prime(&a, p) == intmat::rank_mod_prime(&aug, p)
}

/// Explicit solution of `E·m ≡ 1` for the atom's own matrix:
/// `m_1 = m`, `m_j = (−1)^j⟨p_2,…,p_{j−1}⟩ + (−1)^{j−1} m·p_1⋯p_{j−1}`.
pub fn atom_solution_closed_form(atom: &Atom, k: u64, m: u64) -> Result<RootAction> {
    check_k(k);
    let p = atom.exponents();
    let kk = k as i128;
    let mut out = Vec::with_capacity(p.len());
    let mut prefix: i128 = 1; // p_1⋯p_{j−1} mod k
    for j in 1..=p.len() {
        let v: i128 = if j == 1 {
            m as i128
        } else {
            let br = zeta::bracket(&p[1..j - 1]) as i128 % kk;
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * br - s * (m as i128 % kk) * prefix
        };
        out.push(v.rem_euclid(kk) as u64);
        prefix = prefix * (p[j - 1] as i128 % kk) % kk;
    }
    let action = RootAction { k, m: out };
    if !action.satisfies(&atom.matrix()) {
        return Err(Error::InvalidSolution {
            k,
            m: action.m.iter().map(|&x| x as i64).collect(),
        });
    }
    Ok(action)
}

/// [`atom_solution_closed_form`] for the chain `(p_1,…,p_n)`.
pub fn chain_solution_closed_form(p: &[u64], k: u64, m: u64) -> Result<RootAction> {
    let atom = Atom::Chain {
        exponents: p.to_vec(),
        variables: (0..p.len()).collect(),
    };
    atom_solution_closed_form(&atom, k, m)
}

/// `b_j = (w_j − m_j d) / (k d) mod 1`.
pub fn root_map_from_weights(w: &WeightSystem, a: &RootAction) -> RootMap {
    let d = BigInt::from(w.degree);
    let kd = BigInt::from(a.k) * &d;
    let b: Vec<BigRational> = w
        .weights
        .iter()
        .zip(&a.m)
        .map(|(&wj, &mj)| {
            let num = BigInt::from(wj) - BigInt::from(mj) * &d;
            frac_part(BigRational::new(num, kd.clone()))
        })
        .collect();
    // k-th iterate is the monodromy
    debug_assert!(b.iter().zip(&w.weights).all(|(bj, &wj)| {
        frac_part(bj * BigRational::from_integer(a.k.into()))
            == frac_part(BigRational::new(wj.into(), d.clone()))
    }));
    RootMap { b }
}

pub fn root_map(f: &InvertiblePolynomial, a: &RootAction) -> Result<RootMap> {
    if a.m.len() != f.n() || !a.satisfies(f.matrix()) {
        return Err(Error::InvalidSolution {
            k: a.k,
            m: a.m.iter().map(|&x| x as i64).collect(),
        });
    }
    Ok(root_map_from_weights(&f.canonical_weights()?, a))
}

fn frac_part(x: BigRational) -> BigRational {
    let fl = x.floor();
    x - fl
}

/// Pointwise order of the root map on the torus where exactly the
/// coordinates in `j` are nonzero.
pub fn stratum_order(b: &RootMap, j: &[usize]) -> u64 {
    assert!(!j.is_empty(), "a stratum needs at least one coordinate");
    j.iter()
        .map(|&i| b.b[i].denom().to_u64().expect("denominator fits u64"))
        .fold(1, |acc, q| acc.lcm(&q))
}

/// The coordinate tori on which an atom's nesting is visible: the tails
/// `{v_j,…,v_m}` of a chain, the full set of a loop.
pub fn compatible_strata(atom: &Atom) -> Vec<Vec<usize>> {
    let v = atom.variables();
    if atom.is_loop() {
        vec![v.to_vec()]
    } else {
        (0..v.len()).map(|j| v[j..].to_vec()).collect()
    }
}

/// Orders the closed forms assume: `p_j⋯p_m` on chain tails, `d` for a loop.
pub fn expected_orders(atom: &Atom) -> Vec<u64> {
    let p = atom.exponents();
    if atom.is_loop() {
        vec![zeta::loop_weights(p).degree]
    } else {
        (0..p.len()).map(|j| p[j..].iter().product()).collect()
    }
}

/// Orders of a root map on every compatible stratum, atom by atom.
pub fn order_profile(atoms: &[Atom], b: &RootMap) -> Vec<Vec<u64>> {
    atoms
        .iter()
        .map(|a| {
            compatible_strata(a)
                .iter()
                .map(|j| stratum_order(b, j))
                .collect()
        })
        .collect()
}

/// Stratum orders of every root action of degree `k`.
#[derive(Clone, Debug, Serialize)]
pub struct RootSurvey {
    pub k: u64,
    pub actions: Vec<RootAction>,
    pub profiles: Vec<Vec<Vec<u64>>>,
    pub expected: Vec<Vec<u64>>,
}

impl RootSurvey {
    pub fn new(f: &InvertiblePolynomial, k: u64) -> Result<Self> {
        let atoms = f.decompose()?.atoms;
        let w = f.canonical_weights()?;
        let actions = solve_congruence(f.matrix(), k);
        let profiles = actions
            .iter()
            .map(|a| order_profile(&atoms, &root_map_from_weights(&w, a)))
            .collect();
        let expected = atoms.iter().map(expected_orders).collect();
        Ok(Self {
            k,
            actions,
            profiles,
            expected,
        })
    }

    /// Whether all actions share one order profile.
    pub fn orders_uniform(&self) -> bool {
        self.profiles.iter().collect::<BTreeSet<_>>().len() <= 1
    }

    /// Actions whose orders match the closed-form assumptions.
    pub fn realizing_actions(&self) -> Vec<&RootAction> {
        self.actions
            .iter()
            .zip(&self.profiles)
            .filter(|(_, p)| **p == self.expected)
            .map(|(a, _)| a)
            .collect()
    }
}

/// Zeta function of a geometric root of degree `k` in the closed-form cases.
///
/// Each atom must be a chain or loop whose own weight gcd is `k`, or a
/// single power `x^p` with `gcd(p, k) = 1`; the atoms are then joined. The
/// value is that of the root actions realizing [`expected_orders`].
/// `k = 1` gives the monodromy zeta function itself.
pub fn geometric_root_zeta(f: &InvertiblePolynomial, k: u64) -> Result<CyclotomicFunction> {
    check_k(k);
    let z = zeta::zeta(f)?;
    if count_solutions(f.matrix(), k).is_zero() {
        return Err(Error::NoGeometricRoot { k });
    }
    if k == 1 {
        return Ok(z);
    }
    let atoms = f.decompose()?.atoms;
    let mut parts = Vec::with_capacity(atoms.len());
    for atom in &atoms {
        let p = atom.exponents();
        let part = match atom {
            Atom::Loop { .. } => {
                let w = zeta::loop_weights(p);
                (w.gcd == k).then(|| {
                    let e = if p.len() % 2 == 1 { 1 } else { -1 };
                    CyclotomicFunction::binomial(w.degree, e)
                })
            }
            Atom::Chain { .. } => {
                let fermat = p.len() == 1 && p[0].gcd(&k) == 1;
                (fermat || zeta::chain_weights(p).gcd == k).then(|| {
                    let n = p.len();
                    CyclotomicFunction::from_pairs((0..n).map(|j| {
                        let e: i64 = if (n - 1 - j) % 2 == 0 { 1 } else { -1 };
                        (p[j..].iter().product::<u64>(), e)
                    }))
                })
            }
        };
        let Some(part) = part else {
            return Err(Error::UnsupportedShape(format!(
                "{atom} has no closed-form root of degree {k}"
            )));
        };
        parts.push((part, atom.len()));
    }
    let root = zeta::thom_sebastiani(&parts)?;
    if root.power(k) != z {
        return Err(Error::Inconsistent(format!(
            "root {root} of degree {k} does not power to {z}"
        )));
    }
    Ok(root)
}

/// The weight gcd `c`, the default root degree.
pub fn default_degree(f: &InvertiblePolynomial) -> Result<u64> {
    Ok(f.canonical_weights()?.gcd)
}
