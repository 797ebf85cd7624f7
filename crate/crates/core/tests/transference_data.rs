use dlab_core::construction::certifiable_starts;
use dlab_core::minpoints::{enumerate_minimal_points, MinimalPointSequence};
use dlab_core::presets;
use dlab_core::rigorous::DEFAULT_PRECISION_CAP;
use dlab_core::transference::*;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn run(name: &str, x_max: i64) -> MinimalPointSequence {
    let (xi, set) = presets::load(name).unwrap();
    enumerate_minimal_points(&xi, &set, &BigRational::from_integer(x_max.into()), DEFAULT_PRECISION_CAP).unwrap()
}

#[test]
fn sqrt2_exponents_are_one() {
    let seq = run("sqrt2", 100_000);
    // 14 entries: the default half tail is too short
    assert!(matches!(estimate_exponents(&seq, &q(1, 2)), Err(TransferenceError::TooFewPoints { .. })));
    // -ln L_i / ln X_i = 1 - ln(X_i L_i) / ln X_i converges like 1 / ln X
    let est = estimate_exponents(&seq, &q(3, 4)).unwrap();
    assert_eq!(est.tail_len, 11);
    assert!((est.lambda - 1.0).abs() < 0.25, "{}", est.lambda);
    assert!((est.lambda_hat - 1.0).abs() < 0.15, "{}", est.lambda_hat);
    assert!(est.consistent);
}

#[test]
fn sqrt2_sandwich_with_fitted_constants() {
    let seq = run("sqrt2", 100_000);
    let (a, b) = fit_power_constants(&seq, &q(1, 1), &q(1, 1), Some(2.0)).unwrap();
    let p = TransferenceProfile::power(1, a, b, q(1, 1), q(1, 1)).unwrap();
    let opts = SandwichOptions { grid_points: 300, x_min: Some(2.0) };
    let rep = check_sandwich(&seq, &p, &opts).unwrap();
    assert_eq!(rep.epsilon, "0");
    assert!(rep.epsilon_nonnegative);
    assert!(rep.monotone[0].increasing);
    assert!(rep.step_bounds_pass);
    assert!(!rep.step_bounds.is_empty());
}

#[test]
fn sandwich_violation_has_witness() {
    let seq = run("sqrt2", 10_000);
    // psi far above the data
    let p = TransferenceProfile::power(1, q(100, 1), q(10, 1), q(1, 1), q(1, 1)).unwrap();
    match check_sandwich(&seq, &p, &SandwichOptions::default()) {
        Err(TransferenceError::SandwichViolated { x, .. }) => assert!(x >= 1.0),
        other => panic!("expected a violation, got {other:?}"),
    }
}

#[test]
fn cubic_sandwich_chain_and_extremal() {
    let seq = run("cubic", 1_000_000);
    let (alpha, beta) = (q(2, 5), q(3, 5));
    let x_min = 10.0;
    let (a, b) = fit_power_constants(&seq, &alpha, &beta, Some(x_min)).unwrap();
    let p = TransferenceProfile::power(2, a, b, alpha.clone(), beta.clone()).unwrap();
    let rep = check_sandwich(&seq, &p, &SandwichOptions { grid_points: 200, x_min: Some(x_min) }).unwrap();
    // 1 - (2/5 + 4/15) = 1/3
    assert_eq!(rep.epsilon, "1/3");
    assert!(rep.monotone.iter().all(|m| m.increasing && m.method == "analytic"));
    assert!(rep.c_empirical > 0.0);
    assert!(rep.step_bounds_pass);

    for i0 in certifiable_starts(&seq, 30) {
        if seq.entries[i0].norm_f64() < x_min {
            continue;
        }
        let chain = product_chain(&seq, &p, i0, x_min).unwrap();
        assert!(chain.hypotheses);
        assert!(chain.holds, "i0 = {i0}: {} > {}", chain.ln_lhs, chain.ln_rhs);
    }

    // minimal points fed back in satisfy (iv); (iii) is exact either way
    let params = ExtremalParams { alpha, beta, eps: q(0, 1), c: q(3, 1) };
    let ext = verify_extremal_sequence(&seq.points(), &seq, &params).unwrap();
    assert_eq!(ext.count(4, Verdict::Pass), seq.len());
    assert_eq!(ext.condition_iii.len(), seq.len() - 2);
}

#[test]
fn non_minimal_point_fails_condition_iv() {
    let seq = run("sqrt2", 1000);
    let mut pts = seq.points();
    // (1, 2): L = |2 - sqrt 2| is beaten by (1, 1)
    pts.insert(2, dlab_core::model::IntegerPoint::from_i64(&[1, 2]));
    let params = ExtremalParams { alpha: q(1, 1), beta: q(1, 1), eps: q(0, 1), c: q(1, 1) };
    let ext = verify_extremal_sequence(&pts, &seq, &params).unwrap();
    assert_eq!(ext.condition_iv[2].verdict, Verdict::Fail);
    assert_eq!(ext.count(4, Verdict::Fail), 1);
}

#[test]
fn random_power_profiles_closed_form_agrees() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let beta = q(rng.gen_range(5..=40), 20);
        let alpha = q(rng.gen_range(1..=20), 20).min(beta.clone());
        let a = q(rng.gen_range(1..=100), 10);
        let b = q(rng.gen_range(1..=100), 10);
        let p = TransferenceProfile::power(n, a, b, alpha, beta).unwrap();
        for j in 0..100 {
            let x = 10f64.powf(j as f64 * 0.08);
            for k in 0..n {
                let v = phi_functions(&p, k, x).unwrap();
                assert!(v.rel_diff.unwrap() < 1e-10, "{p:?} k={k} x={x}");
            }
        }
    }
}
