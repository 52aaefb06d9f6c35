//! Exact integer linear algebra: Bareiss determinants, Smith normal form
//! with transforms, integer solvability and rank modulo a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn from_u64(rows: &[Vec<u64>]) -> IntMatrix {
    rows.iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Fraction-free Gaussian elimination. The matrix must be square.
pub fn determinant(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: IntMatrix = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `left · A · right = diag` with `left`, `right` unimodular and each
/// nonzero diagonal entry dividing the next.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }
}

pub fn smith(a: &[Vec<BigInt>]) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: IntMatrix = a.to_vec();
    let mut left = identity(rows);
    let mut right = identity(cols);

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block as pivot
        let Some((pi, pj)) = smallest_entry(&m, t) else {
            break;
        };
        swap_rows(&mut m, &mut left, t, pi);
        swap_cols(&mut m, &mut right, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                add_row(&mut m, &mut left, i, t, &-q);
                if !m[i][t].is_zero() {
                    swap_rows(&mut m, &mut left, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                add_col(&mut m, &mut right, j, t, &-q);
                if !m[t][j].is_zero() {
                    swap_cols(&mut m, &mut right, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
            match offender {
                Some((i, _)) => add_row(&mut m, &mut left, t, i, &BigInt::one()),
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
    }

    let diag = (0..rows.min(cols)).map(|i| m[i][i].clone()).collect();
    Smith { diag, left, right }
}

fn smallest_entry(m: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_rows(m: &mut IntMatrix, left: &mut IntMatrix, a: usize, b: usize) {
    m.swap(a, b);
    left.swap(a, b);
}

fn swap_cols(m: &mut IntMatrix, right: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut().chain(right.iter_mut()) {
        row.swap(a, b);
    }
}

// row[dst] += factor * row[src]
fn add_row(m: &mut IntMatrix, left: &mut IntMatrix, dst: usize, src: usize, factor: &BigInt) {
    for mat in [m, left] {
        let src_row = mat[src].clone();
        for (x, y) in mat[dst].iter_mut().zip(src_row) {
            *x += factor * y;
        }
    }
}

// col[dst] += factor * col[src]
fn add_col(m: &mut IntMatrix, right: &mut IntMatrix, dst: usize, src: usize, factor: &BigInt) {
    for mat in [m, right] {
        for row in mat.iter_mut() {
            let y = row[src].clone();
            row[dst] += factor * y;
        }
    }
}

/// Some integer solution of `a · x = b`, if one exists.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let cols = a.first().map_or(0, Vec::len);
    let snf = smith(a);
    let rank = snf.rank();
    let ub = mat_vec(&snf.left, b);
    let mut y = vec![BigInt::zero(); cols];
    for (i, v) in ub.iter().enumerate() {
        if i < rank {
            let (q, r) = v.div_rem(&snf.diag[i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !v.is_zero() {
            return None;
        }
    }
    let x = mat_vec(&snf.right, &y);
    debug_assert_eq!(mat_vec(a, &x), b);
    Some(x)
}

/// Rank of `a` reduced modulo the prime `p`.
pub fn rank_mod_prime(a: &[Vec<i64>], p: u64) -> usize {
    let p = p as i128;
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|row| row.iter().map(|&x| (x as i128).rem_euclid(p)).collect())
        .collect();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inverse(m[rank][col], p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != rank && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - f * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    let e = a.extended_gcd(&p);
    e.x.rem_euclid(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    // Laplace expansion, independent of the elimination path.
    fn laplace(a: &[Vec<BigInt>]) -> BigInt {
        if a.is_empty() {
            return BigInt::one();
        }
        let n = a.len();
        (0..n)
            .map(|j| {
                let minor: IntMatrix = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &a[0][j] * laplace(&minor);
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }

    #[test]
    fn determinant_matches_laplace() {
        let cases = [
            m(&[&[3, 1, 0], &[0, 4, 1], &[0, 0, 5]]),
            m(&[&[0, 2, 1], &[1, 0, 3], &[4, 1, 0]]),
            m(&[&[2, 1], &[1, 3]]),
            m(&[&[1, 1], &[1, 1]]),
            m(&[&[0, 0, 1, 2], &[3, 0, 1, 0], &[1, 2, 0, 5], &[0, 7, 1, 1]]),
        ];
        for a in &cases {
            assert_eq!(determinant(a), laplace(a));
        }
        assert_eq!(determinant(&cases[0]), BigInt::from(60));
    }

    #[test]
    fn smith_is_a_valid_factorization() {
        let cases = [
            m(&[&[3, 1, 0], &[0, 4, 1], &[0, 0, 5]]),
            m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]),
            m(&[&[2, 0], &[0, 3]]),
            m(&[&[1, 2, 3], &[2, 4, 6]]),
        ];
        for a in &cases {
            let s = smith(a);
            let d = mat_mul(&mat_mul(&s.left, a), &s.right);
            for (i, row) in d.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if i == j {
                        assert_eq!(*x, s.diag[i]);
                    } else {
                        assert!(x.is_zero());
                    }
                }
            }
            for w in s.diag.windows(2) {
                if !w[1].is_zero() {
                    assert!((&w[1] % &w[0]).is_zero());
                }
            }
            assert_eq!(determinant(&s.left).abs(), BigInt::one());
            assert_eq!(determinant(&s.right).abs(), BigInt::one());
        }
        assert_eq!(
            smith(&cases[1]).diag,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        assert_eq!(
            smith(&cases[2]).diag,
            vec![BigInt::from(1), BigInt::from(6)]
        );
        assert_eq!(smith(&cases[3]).rank(), 1);
    }

    #[test]
    fn integer_solvability() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let b: Vec<BigInt> = vec![4.into(), 9.into()];
        assert_eq!(
            solve_integer(&a, &b),
            Some(vec![BigInt::from(2), BigInt::from(3)])
        );
        assert_eq!(solve_integer(&a, &[1.into(), 0.into()]), None);
        let a = m(&[&[2, 3]]);
        let x = solve_integer(&a, &[1.into()]).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![BigInt::one()]);
    }

    #[test]
    fn rank_over_prime_fields() {
        let a = vec![vec![3, 1, 0], vec![0, 4, 1], vec![0, 0, 5]];
        assert_eq!(rank_mod_prime(&a, 2), 2);
        assert_eq!(rank_mod_prime(&a, 7), 3);
        assert_eq!(rank_mod_prime(&a, 5), 2);
        assert_eq!(rank_mod_prime(&a, 3), 2);
        assert_eq!(rank_mod_prime(&[vec![2, 4], vec![1, 2]], 7), 1);
    }
}
