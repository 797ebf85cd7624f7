//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (visible with
//! `--nocapture`) and then asserts.

use std::time::{Duration, Instant};

use dlab_core::construction::{certifiable_starts, family_report, height_product_ratio};
use dlab_core::minpoints::oracle::{exhaustive_minimal_points, verify_properties};
use dlab_core::minpoints::{enumerate_minimal_points, MinimalPointSequence};
use dlab_core::model::IntegerPoint;
use dlab_core::presets;
use dlab_core::rigorous::{RigorousReal, DEFAULT_PRECISION_CAP};
use dlab_core::spectra::{enclosure_f64, lambda_n};
use dlab_core::subspaces::schmidt_fuzz;
use dlab_core::transference::{
    check_determinants, check_growth_conditions, epsilon_bounds, estimate_exponents, mm_lhs, phi_functions,
    ExtremalParams, TransferenceProfile, Verdict,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn run(name: &str, x_max: i64) -> MinimalPointSequence {
    let (xi, set) = presets::load(name).unwrap();
    enumerate_minimal_points(&xi, &set, &BigRational::from_integer(x_max.into()), DEFAULT_PRECISION_CAP).unwrap()
}

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id:>2} {} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_sqrt2_minimal_points_are_convergents() {
    let start = Instant::now();
    let seq = run("sqrt2", 100_000);
    let elapsed = start.elapsed();
    // convergents p/q of sqrt 2: 1/1, 3/2, 7/5, ... with p' = 2p + p'', q' = 2q + q''
    let (mut p, mut qq, mut p_prev, mut q_prev) = (1i64, 1i64, 1i64, 0i64);
    let mut expected = Vec::new();
    while qq * qq + p * p <= 100_000i64 * 100_000 {
        expected.push(IntegerPoint::from_i64(&[qq, p]));
        let (pn, qn) = (2 * p + p_prev, 2 * qq + q_prev);
        (p_prev, q_prev, p, qq) = (p, qq, pn, qn);
    }
    let got: Vec<IntegerPoint> = seq.points().into_iter().skip(1).collect();
    let ok = got == expected && elapsed < Duration::from_secs(10);
    report(1, "sqrt2 convergents", ok, format!("{} points match, {:.2?}", got.len(), elapsed));
}

#[test]
fn criterion_02_lambda_2_is_inverse_golden_ratio() {
    let l = lambda_n(2, &q(1, 1_000_000_000_000_000)).unwrap();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    // exact: (sqrt5 - 1)/2 in [lo, hi] iff (2 lo + 1)^2 <= 5 <= (2 hi + 1)^2
    let (lo, hi) = &l.enclosure;
    let two = q(2, 1);
    let one = q(1, 1);
    let five = q(5, 1);
    let a = &two * lo + &one;
    let b = &two * hi + &one;
    let contains = &a * &a <= five && &b * &b >= five;
    let form = mm_lhs(l.value, 1.0, 2).unwrap();
    let ok = (l.value - golden).abs() <= 1e-12 && contains && (form - 1.0).abs() <= 1e-10;
    report(
        2,
        "lambda_2 golden ratio",
        ok,
        format!("lambda_2 = {:.15}, |diff| = {:.1e}, form = {form:.15}", l.value, (l.value - golden).abs()),
    );
}

#[test]
fn criterion_03_lambda_n_gives_equality_and_zero_defect() {
    let mut worst_form = 0f64;
    let mut worst_eps = 0f64;
    for n in 2..=6usize {
        let l = lambda_n(n, &q(1, 1_000_000_000_000_000)).unwrap();
        let beta = q(1, n as i64 - 1);
        let form = mm_lhs(l.value, 1.0 / (n as f64 - 1.0), n).unwrap();
        worst_form = worst_form.max((form - 1.0).abs());
        let (e_lo, e_hi) = epsilon_bounds(&l.enclosure.0, &l.enclosure.1, &beta, n).unwrap();
        let (lo, hi) = enclosure_f64(&(e_lo, e_hi));
        worst_eps = worst_eps.max(lo.abs()).max(hi.abs());
    }
    let ok = worst_form <= 1e-10 && worst_eps <= 1e-10;
    report(3, "lambda_n equality, n = 2..6", ok, format!("max |form - 1| = {worst_form:.1e}, max |eps| = {worst_eps:.1e}"));
}

#[test]
fn criterion_04_cubic_subspace_identities_are_exact() {
    let start = Instant::now();
    let seq = run("cubic", 10_000);
    let starts = certifiable_starts(&seq, 20);
    let mut failures = Vec::new();
    for &i0 in &starts {
        let rep = family_report(&seq, i0).unwrap();
        if !rep.identities.all_pass() || !rep.identities.s_table_decreasing {
            failures.push(i0);
        }
    }
    let elapsed = start.elapsed();
    let ok = !starts.is_empty() && failures.is_empty() && elapsed < Duration::from_secs(60);
    report(
        4,
        "cubic identities and s-table",
        ok,
        format!("{} entries, starts {:?}, failures {:?}, {:.2?}", seq.len(), starts, failures, elapsed),
    );
}

#[test]
fn criterion_05_height_ratio_stays_bounded() {
    let seq = run("cubic", 10_000);
    let starts = certifiable_starts(&seq, 20);
    let reps: Vec<_> = starts.iter().map(|&i0| height_product_ratio(&seq, i0).unwrap()).collect();
    let half = reps.len() / 2;
    let first = reps[..half].iter().map(|r| r.ratio_lower).fold(0.0, f64::max);
    let second = reps[half..].iter().map(|r| r.ratio_upper).fold(0.0, f64::max);
    let ok = half > 0 && second <= 4.0 * first;
    report(5, "height ratio boundedness", ok, format!("first-half max {first:.4}, second-half max {second:.4}"));
}

#[test]
fn criterion_06_iterated_and_closed_products_agree() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0f64;
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
                worst = worst.max(phi_functions(&p, k, x).unwrap().rel_diff.unwrap());
            }
        }
    }
    report(6, "closed-form products", worst <= 1e-10, format!("max relative difference {worst:.1e}"));
}

#[test]
fn criterion_07_cubic_exponents_respect_the_spectrum_constraint() {
    // 10^7 gives 20 entries, enough for a 10-entry half tail
    let seq = run("cubic", 10_000_000);
    let est = estimate_exponents(&seq, &q(1, 2)).unwrap();
    let form = mm_lhs(est.lambda_hat, est.lambda, 2).unwrap();
    let ok = form <= 1.05 && (est.lambda - 0.5).abs() <= 0.1;
    report(
        7,
        "cubic exponent form",
        ok,
        format!("{} entries, lambda = {:.4}, lambda_hat = {:.4}, form = {form:.4}", seq.len(), est.lambda, est.lambda_hat),
    );
}

#[test]
fn criterion_08_fast_enumeration_matches_exhaustive_scan() {
    let x_max = BigRational::from_integer(2000.into());
    let mut lines = Vec::new();
    let mut ok = true;
    for name in presets::NAMES {
        let (xi, set) = presets::load(name).unwrap();
        let seq = enumerate_minimal_points(&xi, &set, &x_max, DEFAULT_PRECISION_CAP).unwrap();
        let oracle = exhaustive_minimal_points(&xi, &set, &x_max, DEFAULT_PRECISION_CAP).unwrap();
        let props = verify_properties(&seq).unwrap();
        let same = seq.points() == oracle;
        ok &= same && props.all_pass();
        lines.push(format!("{name}: {} points, equal {same}, properties {}", seq.len(), props.all_pass()));
    }
    report(8, "enumeration vs exhaustive", ok, lines.join("; "));
}

#[test]
fn criterion_09_schmidt_fuzz_and_duality() {
    let rep = schmidt_fuzz(&[2, 3, 4, 5], 1000, 1);
    let four = q(4, 1);
    let ok = rep.max_ratio_sq <= four && rep.duality_failures == 0 && rep.plucker_mismatches == 0 && rep.count == 1000;
    report(
        9,
        "height inequality fuzz",
        ok,
        format!(
            "max ratio^2 = {} ({:.4}), {} duality checks, {} failures",
            rep.max_ratio_sq, rep.max_ratio_sq_f64, rep.duality_checks, rep.duality_failures
        ),
    );
}

#[test]
fn criterion_10_synthetic_extremal_fixtures() {
    // ||y_{i+1}|| = ||y_i||^2 and L(y_i) = ||y_i||^-2: alpha = 1, beta = 2, exact
    let norms_sq: Vec<BigInt> = (0..6).map(|i| BigInt::from(2).pow(2u32 << i)).collect();
    let values: Vec<RigorousReal> =
        norms_sq.iter().map(|n| RigorousReal::rational(BigRational::new(1.into(), n.clone()))).collect();
    let params = ExtremalParams { alpha: q(1, 1), beta: q(2, 1), eps: q(0, 1), c: q(0, 1) };
    let (ci, cii) = check_growth_conditions(&norms_sq, &values, &params, 2).unwrap();
    let growth_ok = ci.iter().chain(&cii).all(|r| r.verdict == Verdict::Pass);

    // three coplanar points: the 3x3 determinant vanishes exactly
    let degenerate: Vec<IntegerPoint> =
        [[1, 0, 0], [0, 1, 0], [1, 1, 0]].iter().map(|r| IntegerPoint::from_i64(r)).collect();
    let det = check_determinants(&degenerate, 2);
    let det_ok = det.len() == 1 && det[0].verdict == Verdict::Fail && det[0].det == "0";
    let zero_check = det.first().map(|d| d.det.parse::<BigInt>().map(|v| v.is_zero()).unwrap_or(false)).unwrap_or(false);
    let ok = growth_ok && det_ok && zero_check && norms_sq.iter().all(|n| n.is_positive());
    report(
        10,
        "synthetic extremal fixtures",
        ok,
        format!("(i) {} rows, (ii) {} rows all pass: {growth_ok}; degenerate det = {:?}", ci.len(), cii.len(), det.first().map(|d| &d.det)),
    );
}
