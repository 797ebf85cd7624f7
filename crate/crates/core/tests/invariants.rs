//! Property tests for the algebraic and numerical invariants.

use dlab_core::linalg;
use dlab_core::model::{IntegerPoint, Independence, L_value, TargetPoint};
use dlab_core::rigorous::{compare, Comparison, RigorousReal, DEFAULT_PRECISION_CAP};
use dlab_core::spectra::{frontier, lambda_n, Frontier};
use dlab_core::subspaces::{saturate_i64, schmidt_ratio};
use dlab_core::transference::{epsilon_delta, mm_lhs, mm_lhs_exact, phi_functions, TransferenceProfile};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn sqrt_enc(n: u32) -> RigorousReal {
    RigorousReal::sqrt_int(&BigInt::from(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_enclosures_are_sound_and_shrink(n in 2u32..10_000, b1 in 20u64..200, extra in 1u64..200) {
        let truth = BigRational::from_integer(n.into());
        let x = sqrt_enc(n);
        let coarse = x.refine(b1).unwrap();
        let fine = coarse.refine(b1 + extra).unwrap();
        for r in [&coarse, &fine] {
            let e = r.enclosure();
            let lo = e.lower().max(BigRational::from_integer(0.into()));
            prop_assert!(&lo * &lo <= truth);
            prop_assert!(e.upper() * e.upper() >= truth);
        }
        let width = |r: &RigorousReal| r.enclosure().upper() - r.enclosure().lower();
        prop_assert!(width(&fine) <= width(&coarse));
    }

    #[test]
    fn comparison_is_antisymmetric(a in 2u32..500, b in 2u32..500, num in -50i64..50, den in 1i64..50) {
        let x = sqrt_enc(a);
        let y = sqrt_enc(b).add(&RigorousReal::ratio(num, den));
        let xy = compare(&x, &y, 512);
        let yx = compare(&y, &x, 512);
        prop_assert_eq!(xy, yx.reverse());
        prop_assert_eq!(compare(&x, &x.clone(), 512), Comparison::Indistinguishable);
    }

    #[test]
    fn l_is_homogeneous(x0 in -500i64..500, x1 in -500i64..500, x2 in -500i64..500, m in 1i64..40) {
        prop_assume!(x0 != 0 || x1 != 0 || x2 != 0);
        let xi = TargetPoint::new(
            vec![RigorousReal::integer(1), sqrt_enc(2), sqrt_enc(3)],
            Independence::Asserted,
        ).unwrap();
        let p = IntegerPoint::from_i64(&[x0, x1, x2]);
        let pm = IntegerPoint::from_i64(&[m * x0, m * x1, m * x2]);
        let l = L_value(&xi, &p, DEFAULT_PRECISION_CAP).unwrap().to_f64();
        let lm = L_value(&xi, &pm, DEFAULT_PRECISION_CAP).unwrap().to_f64();
        prop_assert!((lm - m as f64 * l).abs() <= 1e-12 * lm.abs().max(1.0));
    }

    #[test]
    fn subspace_heights_duality_and_plucker(
        rows in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 1..4)
    ) {
        let w = saturate_i64(4, &rows);
        prop_assert_eq!(&w.plucker_squared_height(), w.squared_height());
        let c = w.orthogonal_complement();
        prop_assert_eq!(c.squared_height(), w.squared_height());
        prop_assert_eq!(c.dim() + w.dim(), 4);
        prop_assert_eq!(c.orthogonal_complement(), w);
    }

    #[test]
    fn subspace_ignores_choice_of_spanning_set(
        rows in prop::collection::vec(prop::collection::vec(-6i64..7, 4), 2..4),
        k in -5i64..6,
        s in 1i64..5,
    ) {
        let w = saturate_i64(4, &rows);
        // a unimodular row operation and a rescaling span the same rational subspace
        let mut moved = rows.clone();
        let r0 = moved[0].clone();
        for (t, v) in moved[1].iter_mut().zip(&r0) {
            *t += k * v;
        }
        for v in moved[0].iter_mut() {
            *v *= s;
        }
        prop_assert_eq!(saturate_i64(4, &moved), w);
        prop_assert_eq!(linalg::rank(&linalg::to_big(&rows)), linalg::rank(&linalg::to_big(&moved)));
    }

    #[test]
    fn schmidt_ratio_at_most_one(
        a in prop::collection::vec(prop::collection::vec(-4i64..5, 4), 1..3),
        b in prop::collection::vec(prop::collection::vec(-4i64..5, 4), 1..3),
    ) {
        let (sa, sb) = (saturate_i64(4, &a), saturate_i64(4, &b));
        prop_assume!(sa.dim() > 0 && sb.dim() > 0);
        let r = schmidt_ratio(&sa, &sb).unwrap();
        prop_assert!(r.ratio_sq <= BigRational::one());
    }

    #[test]
    fn iterated_phi_matches_closed_form(
        n in 1usize..6, an in 1i64..100, bn in 1i64..100, al in 1i64..20, be in 1i64..40, lx in 0.0f64..8.0
    ) {
        prop_assume!(al <= be);
        let p = TransferenceProfile::power(n, q(an, 10), q(bn, 10), q(al, 20), q(be, 20)).unwrap();
        let x = 10f64.powf(lx);
        for k in 0..n {
            let v = phi_functions(&p, k, x).unwrap();
            prop_assert!(v.rel_diff.unwrap() < 1e-10);
        }
    }

    #[test]
    fn exponent_form_decreases_to_lambda_hat(lh in 0.0f64..1.0, l1 in 0.0f64..5.0, dl in 0.001f64..5.0, n in 1usize..7) {
        let l1 = l1.max(lh);
        let a = mm_lhs(lh, l1, n).unwrap();
        let b = mm_lhs(lh, l1 + dl, n).unwrap();
        prop_assert!(b <= a + 1e-15);
        prop_assert!(b >= lh - 1e-15);
        let far = mm_lhs(lh, 1e12, n).unwrap();
        prop_assert!((far - lh).abs() < 1e-9);
        prop_assert_eq!(mm_lhs(lh, f64::INFINITY, n).unwrap(), lh);
    }

    #[test]
    fn epsilon_is_one_minus_exponent_form(al in 1i64..30, be in 1i64..30, n in 1usize..7) {
        prop_assume!(al <= be);
        let (alpha, beta) = (q(al, 10), q(be, 10));
        let ed = epsilon_delta(&q(1, 1), &q(1, 1), &alpha, &beta, n).unwrap();
        let form = mm_lhs_exact(&alpha, Some(&beta), n).unwrap();
        prop_assert_eq!(ed.epsilon, BigRational::one() - form);
    }

    #[test]
    fn frontier_lies_on_the_unit_level_set(n in 2usize..7, t in 0.0f64..0.98) {
        let lo = 1.0 / n as f64;
        let lh = lo + (1.0 - lo) * t;
        match frontier(lh, n).unwrap() {
            Frontier::Finite(l) => {
                prop_assert!(l >= lh);
                let v = mm_lhs(lh, l, n).unwrap();
                prop_assert!((v - 1.0).abs() <= 1e-10, "n={} lh={} l={} form={}", n, lh, l, v);
            }
            Frontier::Infinite => prop_assert!(false, "finite boundary expected below lambda_hat = 1"),
        }
    }
}

#[test]
fn lambda_n_decreases_in_n() {
    let tol = q(1, 1_000_000_000_000);
    let vals: Vec<f64> = (2..=8).map(|n| lambda_n(n, &tol).unwrap().value).collect();
    for w in vals.windows(2) {
        assert!(w[1] < w[0], "{vals:?}");
    }
}

#[test]
fn lambda_n_is_a_root() {
    for n in 2..=6 {
        let l = lambda_n(n, &q(1, 1_000_000_000_000)).unwrap();
        // x + (n-1) x^2 + ... + (n-1)^(n-1) x^n = 1, with a sign change across the enclosure
        let f = |x: f64| (1..=n).map(|j| ((n - 1) as f64).powi(j as i32 - 1) * x.powi(j as i32)).sum::<f64>() - 1.0;
        assert!(f(l.value).abs() < 1e-11, "n = {n}");
        let (lo, hi) = dlab_core::spectra::enclosure_f64(&l.enclosure);
        assert!(lo <= l.value && l.value <= hi);
    }
}
