use bhzeta::intmat;
use bhzeta::zeta;
use bhzeta::{CyclotomicFunction, InvertiblePolynomial};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn cyclo() -> impl Strategy<Value = CyclotomicFunction> {
    prop::collection::vec((1u64..=30, -6i64..=6), 0..=3).prop_map(CyclotomicFunction::from_pairs)
}

// supported on divisors of 60 so Saito duality is defined
fn cyclo60() -> impl Strategy<Value = CyclotomicFunction> {
    const DIVS: [u64; 12] = [1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60];
    prop::collection::vec((prop::sample::select(&DIVS[..]), -5i64..=5), 0..=4)
        .prop_map(CyclotomicFunction::from_pairs)
}

fn series_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    (0..a.len())
        .map(|j| (0..=j).map(|i| &a[i] * &b[j - i]).sum())
        .collect()
}

proptest! {
    #[test]
    fn multiplication_is_an_abelian_group(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a * &a.inverse()).is_one());
        prop_assert_eq!(&a * &CyclotomicFunction::one(), a.clone());
        prop_assert_eq!(&(&a * &b) / &b, a);
    }

    #[test]
    fn power_composes(a in cyclo(), k in 1u64..=12, l in 1u64..=12) {
        prop_assert_eq!(a.power(k).power(l), a.power(k * l));
        prop_assert_eq!(a.power(1), a.clone());
    }

    #[test]
    fn power_is_multiplicative(a in cyclo(), b in cyclo(), k in 1u64..=12) {
        prop_assert_eq!((&a * &b).power(k), &a.power(k) * &b.power(k));
        prop_assert_eq!(a.inverse().power(k), a.power(k).inverse());
    }

    #[test]
    fn power_preserves_degree(a in cyclo(), k in 1u64..=12) {
        prop_assert_eq!(a.power(k).char_degree(), a.char_degree());
    }

    #[test]
    fn saito_dual_is_an_involution(a in cyclo60()) {
        let dual = a.saito_dual(60).unwrap();
        prop_assert_eq!(dual.saito_dual(60).unwrap(), a.clone());
        prop_assert_eq!(a.inverse().saito_dual(60).unwrap(), dual.inverse());
    }

    #[test]
    fn saito_dual_rejects_non_divisors(m in 1u64..=100, s in 1i64..=4) {
        let a = CyclotomicFunction::binomial(m, s);
        prop_assert_eq!(a.saito_dual(60).is_ok(), 60 % m == 0);
    }

    #[test]
    fn series_of_a_product_is_the_product_of_series(a in cyclo(), b in cyclo()) {
        let order = 40;
        prop_assert_eq!((&a * &b).series_expand(order), series_mul(&a.series_expand(order), &b.series_expand(order)));
        let inv = series_mul(&a.series_expand(order), &a.inverse().series_expand(order));
        prop_assert!(inv[0].is_one() && inv[1..].iter().all(Zero::is_zero));
    }

    #[test]
    fn roots_of_powers_round_trip(psi in cyclo(), k in 1u64..=12) {
        let phi = psi.power(k);
        prop_assert!(phi.root_exists(k));
        let root = phi.canonical_root(k).unwrap();
        prop_assert_eq!(root.power(k), phi);
    }

    // The bounded root set is a product over target factors, so it is
    // nonempty iff each factor alone has a bounded root. Enumerating the
    // full product is far too large beyond k = 10.
    #[test]
    fn root_existence_matches_bounded_search(
        support in prop::collection::vec((1u64..=30, -6i64..=6), 0..=3),
        k in 1u64..=10,
    ) {
        let phi = CyclotomicFunction::from_pairs(support);
        let bound = u64::try_from(phi.max_abs_exponent()).unwrap() + k;
        let mut nonempty = true;
        for (m, s) in phi.pairs() {
            let found = CyclotomicFunction::binomial(m, s.clone()).enumerate_roots(k, bound);
            for r in &found {
                prop_assert_eq!(r.power(k), CyclotomicFunction::binomial(m, s.clone()));
            }
            nonempty &= !found.is_empty();
        }
        prop_assert_eq!(phi.root_exists(k), nonempty);
        if phi.support().len() <= 1 {
            prop_assert_eq!(phi.root_exists(k), !phi.enumerate_roots(k, bound).is_empty());
        }
    }

    #[test]
    fn json_round_trip(a in cyclo()) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<CyclotomicFunction>(&s).unwrap(), a);
    }
}

fn invertible() -> impl Strategy<Value = InvertiblePolynomial> {
    (1usize..=4)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0u64..=4, n), n))
        .prop_filter_map("singular", |m| {
            InvertiblePolynomial::from_matrix(m, None).ok()
        })
}

proptest! {
    #[test]
    fn weights_solve_the_degree_equation(f in invertible()) {
        let Ok(w) = f.canonical_weights() else { return Ok(()) };
        for row in f.matrix() {
            let total: u64 = row.iter().zip(&w.weights).map(|(e, w)| e * w).sum();
            prop_assert_eq!(total, w.degree);
        }
    }

    #[test]
    fn transpose_shares_determinant(f in invertible()) {
        prop_assert_eq!(f.transpose().determinant(), f.determinant());
        let back = f.transpose().transpose();
        prop_assert_eq!(back.matrix(), f.matrix());
    }

    #[test]
    fn display_parses_back(f in invertible()) {
        let g: InvertiblePolynomial = f.to_string().parse().unwrap();
        prop_assert_eq!(g.matrix(), f.matrix());
    }

    #[test]
    fn smith_factorization(m in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..=4)) {
        let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let s = intmat::smith(&a);
        let d = intmat::mat_mul(&intmat::mat_mul(&s.left, &a), &s.right);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j { prop_assert_eq!(x, &s.diag[i]); } else { prop_assert!(x.is_zero()); }
            }
        }
    }
}

#[test]
fn closed_forms_agree_with_oracle_on_chains_and_loops() {
    use bhzeta::duality::{enumerate_ks, ShapeFilter};
    let shapes = ShapeFilter {
        chain: true,
        loops: true,
        mixed: false,
    };
    for f in enumerate_ks(3, 2, 4, shapes) {
        let w = f.canonical_weights().unwrap();
        assert_eq!(
            zeta::zeta(&f).unwrap(),
            zeta::milnor_orlik_zeta(&w, 3).unwrap(),
            "{f}"
        );
    }
}
