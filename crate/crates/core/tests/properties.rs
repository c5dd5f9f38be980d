use std::f64::consts::PI;

use glsieve::hecke::{fourier_coefficient, SatakePoint};
use glsieve::lr::lr_product;
use glsieve::primes::{is_squarefree, is_squarefull};
use glsieve::schur::{dimension, eval_schur, EvalPoint};
use glsieve::sieve::{lemma_a_report, pair_decompose, PrimeWindow};
use glsieve::weights::WeightVector;
use glsieve::Complex64;
use num_bigint::BigUint;
use proptest::prelude::*;

fn weight(max_n: usize, max_part: u32) -> impl Strategy<Value = WeightVector> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(0..=max_part, n - 1).prop_map(move |p| WeightVector::new(n, p).unwrap())
    })
}

fn weight_pair(max_n: usize, max_part: u32) -> impl Strategy<Value = (WeightVector, WeightVector)> {
    (2..=max_n).prop_flat_map(move |n| {
        let v = prop::collection::vec(0..=max_part, n - 1);
        (v.clone(), v).prop_map(move |(a, b)| (WeightVector::new(n, a).unwrap(), WeightVector::new(n, b).unwrap()))
    })
}

fn torus(n: usize, angles: &[f64]) -> EvalPoint {
    EvalPoint::torus(&angles[..n - 1])
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_parse_round_trip(k in weight(6, 3)) {
        let back = WeightVector::parse(&k.to_string(), None).unwrap();
        prop_assert_eq!(back, k);
    }

    #[test]
    fn weighted_norms_of_dual_pair(k in weight(6, 3)) {
        let n = k.rank() as u32;
        prop_assert_eq!(k.wnorm() + k.involute().wnorm(), n * k.abs());
        prop_assert_eq!(k.involute().abs(), k.abs());
    }

    #[test]
    fn schur_is_homogeneous(
        k in weight(4, 3),
        angles in prop::collection::vec(0.0..2.0 * PI, 3),
        r in 0.5f64..1.5,
        phase in 0.0..2.0 * PI,
    ) {
        let n = k.rank();
        let x = torus(n, &angles);
        let c = Complex64::from_polar(r, phase);
        let scaled = EvalPoint::new(x.coords().iter().map(|z| z * c).collect()).unwrap();
        let lhs = eval_schur(&k, &scaled).unwrap();
        let rhs = c.powu(k.wnorm()) * eval_schur(&k, &x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn schur_is_symmetric(k in weight(4, 3), angles in prop::collection::vec(0.0..2.0 * PI, 3)) {
        let n = k.rank();
        let x = torus(n, &angles);
        let mut rev = x.coords().to_vec();
        rev.reverse();
        let y = EvalPoint::new(rev).unwrap();
        let a = eval_schur(&k, &x).unwrap();
        let b = eval_schur(&k, &y).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn torus_values_conjugate_under_involution(k in weight(5, 3), angles in prop::collection::vec(0.0..2.0 * PI, 4)) {
        let a = SatakePoint::from_angles(&angles[..k.rank() - 1]).unwrap();
        prop_assert!(a.is_tempered());
        let x = fourier_coefficient(&k, &a).unwrap();
        let y = fourier_coefficient(&k.involute(), &a).unwrap();
        prop_assert!((x.conj() - y).norm() <= 1e-10 * x.norm().max(1.0));
        prop_assert!(x.norm() <= glsieve::measures::c_kappa(&k));
    }

    #[test]
    fn lr_products_commute_and_preserve_dimension((a, b) in weight_pair(4, 2)) {
        let ab = lr_product(&a, &b).unwrap();
        prop_assert_eq!(&ab, &lr_product(&b, &a).unwrap());
        let total: BigUint = ab.iter().map(|(xi, c)| c * dimension(xi)).sum();
        prop_assert_eq!(total, dimension(&a) * dimension(&b));
    }

    #[test]
    fn lr_product_evaluates_to_product((a, b) in weight_pair(3, 2), angles in prop::collection::vec(0.0..2.0 * PI, 2)) {
        let x = torus(a.rank(), &angles);
        let lhs = eval_schur(&a, &x).unwrap() * eval_schur(&b, &x).unwrap();
        let rhs = lr_product(&a, &b).unwrap().evaluate(&x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9);
    }

    #[test]
    fn pair_split_is_coprime_squarefree_times_squarefull(l in 1u64..5000, m in 1u64..5000) {
        let d = pair_decompose(l, m).unwrap();
        prop_assert_eq!(d.l1 * d.l_prime, l);
        prop_assert_eq!(d.m1 * d.m_prime, m);
        let h = d.l1 * d.m1;
        let r = d.l_prime * d.m_prime;
        prop_assert!(is_squarefree(h));
        prop_assert!(is_squarefull(r));
        prop_assert_eq!(gcd(h, r), 1);
    }

    #[test]
    fn weighted_aj_sum_is_a_power(p in 3.0f64..60.0, j in 1u32..4, d in 0.25f64..3.0) {
        let win = PrimeWindow::new(p, 2.0 * p).unwrap();
        let r = lemma_a_report(j, &win, d).unwrap();
        prop_assert!(r.identity_residual <= 1e-12);
        prop_assert!(r.all_ok);
    }
}
