//! Exponent estimates, the function triples `(psi, phi, theta)` with their products, and the
//! checks on minimal-point data that go with them.
//!
//! A profile fixes `psi(X) = b X^-beta` and `phi(X) = a X^-alpha` (optionally times powers of
//! `ln X`), and `theta` with `phi = psi o theta`. Then
//!
//! ```text
//! phi_k(X) = phi(X) phi(theta(X)) ... phi(theta^k(X)),    Phi_k(X) = X phi_k(X)
//! ```
//!
//! For the power family `Phi_k(X) = c_k X^{eps_k}` with
//! `eps_k = 1 - sum_{j<=k} alpha^{j+1}/beta^j`, `c_k = a^{k+1} (a/b)^{delta_k}` and
//! `delta_k = sum_{j=1}^k sum_{i=1}^j (alpha/beta)^i`.
//!
//! Most evaluation happens on logarithms (`u = ln X`) so that large `X` and long products
//! stay in range.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::construction::{select_indices, ConstructionError};
use crate::linalg::{self, IntVec};
use crate::minpoints::{ln_bigint, ln_dyadic, MinimalPointSequence, MinpointsError};
use crate::model::IntegerPoint;
use crate::rigorous::{compare, Comparison, RigorousReal};
use crate::subspaces::ser_rational;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TransferenceError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("need at least {needed} entries in the tail window, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("sandwich violated at X = {x}: {detail}")]
    SandwichViolated { x: f64, detail: String },
    #[error("domain too short: {0}")]
    DomainTooShort(String),
    #[error(transparent)]
    Minpoints(#[from] MinpointsError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

type Result<T> = std::result::Result<T, TransferenceError>;

fn domain(msg: impl Into<String>) -> TransferenceError {
    TransferenceError::Domain(msg.into())
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn sig(v: f64) -> String {
    format!("{v:.14e}")
}

// ---------------------------------------------------------------------------------------
// exponents

/// Fewest entries the tail window may hold.
pub const MIN_TAIL: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct ExponentEstimate {
    pub lambda: f64,
    pub lambda_hat: f64,
    pub tail_start: usize,
    pub tail_len: usize,
    /// `-ln L_i / ln X_i` for `i` in the tail
    pub lambda_series: Vec<f64>,
    /// `-ln L_i / ln X_{i+1}` for `i` in the tail
    pub lambda_hat_series: Vec<f64>,
    /// Least-squares slope of `-ln L_i` against `ln X_i`; a diagnostic only.
    pub regression_slope: Option<f64>,
    /// `lambda_hat <= lambda` and `0 <= lambda_hat <= 1`, up to 1e-9.
    pub consistent: bool,
}

/// Estimates from the step structure of `L(X; S)` over the last `tail_fraction` of entries.
pub fn estimate_exponents(seq: &MinimalPointSequence, tail_fraction: &BigRational) -> Result<ExponentEstimate> {
    let ln_x: Vec<f64> = seq.entries.iter().map(|e| e.ln_norm()).collect();
    let ln_l: Vec<f64> = seq.entries.iter().map(|e| e.ln_l()).collect();
    estimate_from_logs(&ln_x, &ln_l, tail_fraction)
}

/// Same estimate on raw data: `ln X_i` strictly increasing, `ln L_i` strictly decreasing.
pub fn estimate_from_logs(ln_x: &[f64], ln_l: &[f64], tail_fraction: &BigRational) -> Result<ExponentEstimate> {
    if ln_x.len() != ln_l.len() {
        return Err(domain("norm and value series differ in length"));
    }
    if !tail_fraction.is_positive() || tail_fraction > &BigRational::one() {
        return Err(domain(format!("tail fraction {tail_fraction} outside (0, 1]")));
    }
    let len = ln_x.len();
    let keep = (BigRational::from_integer(len.into()) * tail_fraction).ceil().to_integer();
    let keep = keep.to_usize().unwrap_or(len).min(len);
    if keep < MIN_TAIL {
        return Err(TransferenceError::TooFewPoints { needed: MIN_TAIL, found: keep });
    }
    let start = len - keep;
    let lambda_series: Vec<f64> = (start..len).filter(|&i| ln_x[i] > 0.0).map(|i| -ln_l[i] / ln_x[i]).collect();
    let lambda_hat_series: Vec<f64> = (start..len.saturating_sub(1)).map(|i| -ln_l[i] / ln_x[i + 1]).collect();
    let lambda = lambda_series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_hat = lambda_hat_series.iter().copied().fold(f64::INFINITY, f64::min);
    let regression_slope = slope(&ln_x[start..], &ln_l[start..].iter().map(|v| -v).collect::<Vec<_>>());
    let tol = 1e-9;
    let consistent = lambda_hat <= lambda + tol && lambda_hat >= -tol && lambda_hat <= 1.0 + tol;
    Ok(ExponentEstimate {
        lambda,
        lambda_hat,
        tail_start: start,
        tail_len: keep,
        lambda_series,
        lambda_hat_series,
        regression_slope,
        consistent,
    })
}

fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `i, ln X_i, -ln L_i` with the per-entry slope proxies.
pub fn exponent_csv(seq: &MinimalPointSequence) -> String {
    let mut out = String::from("i,ln_X_i,neg_ln_L_i,lambda_i,lambda_hat_i\n");
    let e = &seq.entries;
    for i in 0..e.len() {
        let (lx, ll) = (e[i].ln_norm(), -e[i].ln_l());
        let lam = if lx > 0.0 { sig(ll / lx) } else { String::new() };
        let lam_hat = if i + 1 < e.len() { sig(ll / e[i + 1].ln_norm()) } else { String::new() };
        let _ = writeln!(out, "{i},{},{},{lam},{lam_hat}", sig(lx + 0.0), sig(ll + 0.0));
    }
    out
}

// ---------------------------------------------------------------------------------------
// the exponent form and its defect

/// `lh + lh^2/l + ... + lh^n/l^{n-1}`; pass `f64::INFINITY` for `l = infinity`.
pub fn mm_lhs(lambda_hat: f64, lambda: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    if !(lambda_hat >= 0.0) || !(lambda >= lambda_hat) {
        return Err(domain(format!("need 0 <= lambda_hat <= lambda, got ({lambda_hat}, {lambda})")));
    }
    if lambda.is_infinite() {
        return Ok(lambda_hat);
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let r = lambda_hat / lambda;
    let mut term = lambda_hat;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += term;
        term *= r;
    }
    Ok(sum)
}

/// Exact version of [`mm_lhs`]; `None` stands for `lambda = infinity`.
pub fn mm_lhs_exact(lambda_hat: &BigRational, lambda: Option<&BigRational>, n: usize) -> Result<BigRational> {
    if n == 0 || lambda_hat.is_negative() {
        return Err(domain("need n >= 1 and lambda_hat >= 0"));
    }
    let Some(l) = lambda else { return Ok(lambda_hat.clone()) };
    if l < lambda_hat {
        return Err(domain("need lambda >= lambda_hat"));
    }
    if l.is_zero() {
        return Ok(BigRational::zero());
    }
    let r = lambda_hat / l;
    let mut term = lambda_hat.clone();
    let mut sum = BigRational::zero();
    for _ in 0..n {
        sum += &term;
        term *= &r;
    }
    Ok(sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonDelta {
    #[serde(serialize_with = "ser_rational")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub delta: BigRational,
    /// `eps_0, ..., eps_{n-1}`
    #[serde(serialize_with = "ser_rationals")]
    pub eps_k: Vec<BigRational>,
    /// `delta_0, ..., delta_{n-1}`
    #[serde(serialize_with = "ser_rationals")]
    pub delta_k: Vec<BigRational>,
    /// `[lower, upper]` for each `c_k`, from f64 logarithms widened by 1e-12 relative.
    pub c_k: Vec<[f64; 2]>,
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

fn check_positive(name: &str, q: &BigRational) -> Result<()> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(domain(format!("{name} = {q} must be positive")))
    }
}

pub fn epsilon_delta(
    a: &BigRational,
    b: &BigRational,
    alpha: &BigRational,
    beta: &BigRational,
    n: usize,
) -> Result<EpsilonDelta> {
    for (name, q) in [("a", a), ("b", b), ("alpha", alpha), ("beta", beta)] {
        check_positive(name, q)?;
    }
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let r = alpha / beta;
    let mut eps_k = Vec::with_capacity(n);
    let mut delta_k = Vec::with_capacity(n);
    let mut sum_exp = BigRational::zero();
    let mut term = alpha.clone();
    // partial sums r + ... + r^j
    let mut geo = BigRational::zero();
    let mut r_pow = BigRational::one();
    let mut delta = BigRational::zero();
    for k in 0..n {
        sum_exp += &term;
        term *= &r;
        eps_k.push(BigRational::one() - &sum_exp);
        if k > 0 {
            r_pow *= &r;
            geo += &r_pow;
            delta += &geo;
        }
        delta_k.push(delta.clone());
    }
    let (ln_a, ln_ab) = (to_f64(a).ln(), (to_f64(a) / to_f64(b)).ln());
    let c_k = delta_k
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let v = (k as f64 + 1.0) * ln_a + to_f64(d) * ln_ab;
            let slack = 1e-12 * (1.0 + v.abs());
            [(v - slack).exp(), (v + slack).exp()]
        })
        .collect();
    Ok(EpsilonDelta { epsilon: eps_k[n - 1].clone(), delta: delta_k[n - 1].clone(), eps_k, delta_k, c_k })
}

/// `eps` with `alpha` known only to lie in `[alpha_lo, alpha_hi]`; `eps` decreases in `alpha`.
pub fn epsilon_bounds(
    alpha_lo: &BigRational,
    alpha_hi: &BigRational,
    beta: &BigRational,
    n: usize,
) -> Result<(BigRational, BigRational)> {
    let one = BigRational::one();
    let hi = epsilon_delta(&one, &one, alpha_lo, beta, n)?.epsilon;
    let lo = epsilon_delta(&one, &one, alpha_hi, beta, n)?.epsilon;
    Ok((lo, hi))
}

/// `(1/(4n)) (alpha/beta)^n min(alpha, beta - alpha)`.
pub fn eps_threshold(alpha: &BigRational, beta: &BigRational, n: usize) -> Result<BigRational> {
    check_positive("alpha", alpha)?;
    if n == 0 || alpha > beta {
        return Err(domain(format!("need n >= 1 and 0 < alpha <= beta, got ({alpha}, {beta}, {n})")));
    }
    let r = alpha / beta;
    let mut rn = BigRational::one();
    for _ in 0..n {
        rn *= &r;
    }
    let m = alpha.clone().min(beta - alpha);
    Ok(rn * m / BigRational::from_integer((4 * n).into()))
}

// ---------------------------------------------------------------------------------------
// profiles

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `psi = b X^-beta`, `phi = a X^-alpha`
    Power,
    /// `psi = b X^-beta ln^rho X`, `phi = a X^-alpha ln^sigma X`
    PowerLog { sigma: f64, rho: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferenceProfile {
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub a: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub b: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub beta: BigRational,
    pub family: Family,
    /// The functions are used on `[threshold, infinity)`.
    pub threshold: f64,
    #[serde(skip)]
    f: Floats,
}

#[derive(Clone, Debug, Default)]
struct Floats {
    ln_a: f64,
    ln_b: f64,
    alpha: f64,
    beta: f64,
}

/// Relative tolerance of the bisection for `theta` in the power-log family.
pub const THETA_TOL: f64 = 1e-12;

impl TransferenceProfile {
    pub fn power(n: usize, a: BigRational, b: BigRational, alpha: BigRational, beta: BigRational) -> Result<Self> {
        Self::build(n, a, b, alpha, beta, Family::Power)
    }

    pub fn power_log(
        n: usize,
        a: BigRational,
        b: BigRational,
        alpha: BigRational,
        beta: BigRational,
        sigma: f64,
        rho: f64,
    ) -> Result<Self> {
        if !sigma.is_finite() || !rho.is_finite() {
            return Err(domain("log exponents must be finite"));
        }
        Self::build(n, a, b, alpha, beta, Family::PowerLog { sigma, rho })
    }

    fn build(n: usize, a: BigRational, b: BigRational, alpha: BigRational, beta: BigRational, family: Family) -> Result<Self> {
        for (name, q) in [("a", &a), ("b", &b), ("alpha", &alpha), ("beta", &beta)] {
            check_positive(name, q)?;
        }
        if n == 0 {
            return Err(domain("n must be at least 1"));
        }
        let f = Floats { ln_a: to_f64(&a).ln(), ln_b: to_f64(&b).ln(), alpha: to_f64(&alpha), beta: to_f64(&beta) };
        let mut p = TransferenceProfile { n, a, b, alpha, beta, family, threshold: 1.0, f };
        if let Family::PowerLog { sigma, rho } = p.family {
            // psi must be decreasing past theta(A) and theta(A) must exist
            let mut u = 1f64.max(rho / p.f.beta).max(sigma / p.f.alpha);
            let mut tries = 0;
            while p.ln_theta(u).is_err() {
                u *= 1.5;
                tries += 1;
                if tries > 80 {
                    return Err(domain("no X where theta is defined"));
                }
            }
            p.threshold = u.exp();
        }
        Ok(p)
    }

    pub fn epsilon_delta(&self) -> Result<EpsilonDelta> {
        epsilon_delta(&self.a, &self.b, &self.alpha, &self.beta, self.n)
    }

    /// `ln psi(e^u)`
    pub fn ln_psi(&self, u: f64) -> f64 {
        let base = self.f.ln_b - self.f.beta * u;
        match self.family {
            Family::Power => base,
            Family::PowerLog { rho, .. } => base + rho * u.ln(),
        }
    }

    /// `ln phi(e^u)`
    pub fn ln_phi(&self, u: f64) -> f64 {
        let base = self.f.ln_a - self.f.alpha * u;
        match self.family {
            Family::Power => base,
            Family::PowerLog { sigma, .. } => base + sigma * u.ln(),
        }
    }

    /// `ln theta(e^u)`, the solution `t` of `ln psi(e^t) = ln phi(e^u)` on the branch where
    /// `psi` decreases.
    pub fn ln_theta(&self, u: f64) -> Result<f64> {
        let target = self.ln_phi(u);
        match self.family {
            Family::Power => Ok((self.f.ln_b - target) / self.f.beta),
            Family::PowerLog { rho, sigma } => {
                if u <= 0.0 {
                    return Err(domain(format!("X = e^{u} is not above 1")));
                }
                if rho == 0.0 {
                    return Ok((self.f.ln_b - target) / self.f.beta);
                }
                let g = |t: f64| self.ln_psi(t) - target;
                let mut lo = if rho > 0.0 { rho / self.f.beta } else { f64::MIN_POSITIVE };
                if g(lo) < 0.0 {
                    return Err(domain(format!(
                        "phi(e^{u}) exceeds the maximum of psi (sigma = {sigma}, rho = {rho})"
                    )));
                }
                let mut hi = lo.max(1.0) * 2.0;
                while g(hi) >= 0.0 {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(domain("theta bracket overflow"));
                    }
                }
                // relative tolerance on theta is absolute tolerance on ln theta
                for _ in 0..2000 {
                    if hi - lo <= THETA_TOL {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid) >= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.ln_psi(x.ln()).exp()
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.ln_phi(x.ln()).exp()
    }

    pub fn theta(&self, x: f64) -> Result<f64> {
        Ok(self.ln_theta(x.ln())?.exp())
    }

    /// `ln phi_k(e^u)` by composing `theta` `k` times.
    pub fn ln_phi_k_iterated(&self, k: usize, u: f64) -> Result<f64> {
        let mut t = u;
        let mut sum = self.ln_phi(t);
        for _ in 0..k {
            t = self.ln_theta(t)?;
            if let Family::PowerLog { .. } = self.family {
                if t <= 0.0 {
                    return Err(domain(format!("theta leaves (1, infinity) from X = e^{u}")));
                }
            }
            sum += self.ln_phi(t);
        }
        Ok(sum)
    }

    /// `ln phi_k(e^u)` from `c_k` and `eps_k`; only the power family has one.
    pub fn ln_phi_k_closed(&self, k: usize, u: f64) -> Option<f64> {
        if self.family != Family::Power {
            return None;
        }
        let r = self.f.alpha / self.f.beta;
        // sum_{j<=k} alpha r^j and sum_{j=1}^k (r + ... + r^j)
        let (mut expo, mut delta, mut geo, mut rp) = (0.0, 0.0, 0.0, 1.0);
        for j in 0..=k {
            expo += self.f.alpha * rp;
            if j > 0 {
                geo += rp;
                delta += geo;
            }
            rp *= r;
        }
        let ln_c = (k as f64 + 1.0) * self.f.ln_a + delta * (self.f.ln_a - self.f.ln_b);
        Some(ln_c - expo * u)
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if x >= self.threshold && x.is_finite() {
            Ok(())
        } else {
            Err(domain(format!("X = {x} lies below the threshold {}", self.threshold)))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiValues {
    pub k: usize,
    pub x: f64,
    pub ln_phi_k: f64,
    pub ln_big_phi_k: f64,
    pub ln_big_phi_k_closed: Option<f64>,
    pub phi_k: f64,
    pub big_phi_k: f64,
    pub big_phi_k_closed: Option<f64>,
    /// `|closed / iterated - 1|`
    pub rel_diff: Option<f64>,
}

/// `phi_k(X)` and `Phi_k(X)`, by iteration and (power family) in closed form.
pub fn phi_functions(profile: &TransferenceProfile, k: usize, x: f64) -> Result<PhiValues> {
    profile.check_domain(x)?;
    if k >= profile.n {
        return Err(domain(format!("k = {k} outside 0..{}", profile.n)));
    }
    let u = x.ln();
    let ln_phi_k = profile.ln_phi_k_iterated(k, u)?;
    let ln_big = u + ln_phi_k;
    let closed = profile.ln_phi_k_closed(k, u).map(|v| v + u);
    Ok(PhiValues {
        k,
        x,
        ln_phi_k,
        ln_big_phi_k: ln_big,
        ln_big_phi_k_closed: closed,
        phi_k: ln_phi_k.exp(),
        big_phi_k: ln_big.exp(),
        big_phi_k_closed: closed.map(f64::exp),
        rel_diff: closed.map(|c| (c - ln_big).exp_m1().abs()),
    })
}

// ---------------------------------------------------------------------------------------
// data checks

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub psi: f64,
    pub envelope: f64,
    pub phi: f64,
    /// `Phi_0(X), ..., Phi_{n-1}(X)`
    pub big_phi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotoneCheck {
    pub k: usize,
    pub increasing: bool,
    /// `"analytic"` (sign of `eps_k`) or `"grid (heuristic)"`.
    pub method: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepBoundRow {
    pub i: usize,
    pub l_i: f64,
    pub phi_next: f64,
    pub x_i: f64,
    pub theta_next: f64,
    pub value_bound: bool,
    pub norm_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub profile: TransferenceProfile,
    pub epsilon: String,
    pub delta: String,
    pub epsilon_nonnegative: bool,
    pub x_min: f64,
    pub x_max: f64,
    pub grid: Vec<GridRow>,
    /// Minimum over the grid of each `Phi_k`.
    pub big_phi_min: Vec<f64>,
    /// Empirical constant: the grid minimum of `Phi_{n-1}`.
    pub c_empirical: f64,
    pub monotone: Vec<MonotoneCheck>,
    pub step_bounds: Vec<StepBoundRow>,
    pub step_bounds_pass: bool,
}

#[derive(Clone, Debug)]
pub struct SandwichOptions {
    pub grid_points: usize,
    /// Lower end of the grid; defaults to the larger of the threshold and `X_0`.
    pub x_min: Option<f64>,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        SandwichOptions { grid_points: 200, x_min: None }
    }
}

/// Relative slack for f64 comparisons of quantities that are each accurate to ~1e-15.
const SLACK: f64 = 1e-10;

fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|j| if j + 1 == count { hi } else { (a + (b - a) * j as f64 / (count - 1) as f64).exp() })
        .collect()
}

fn x_range(seq: &MinimalPointSequence, profile: &TransferenceProfile, x_min: Option<f64>) -> Result<(f64, f64)> {
    let first = seq.entries.first().map(|e| e.norm_f64()).ok_or_else(|| {
        TransferenceError::DomainTooShort("the sequence is empty".into())
    })?;
    let x_max = to_f64(&seq.exhausted_up_to);
    let x_min = x_min.unwrap_or(profile.threshold.max(first)).max(profile.threshold).max(first);
    if !(x_min < x_max) {
        return Err(TransferenceError::DomainTooShort(format!(
            "the grid [{x_min}, {x_max}] is empty; enumerate further or lower x_min"
        )));
    }
    Ok((x_min, x_max))
}

/// `L(X; S)` as f64 bounds, from the entry count below `X` (no rational conversion of `X`).
fn envelope_bounds(seq: &MinimalPointSequence, x: f64) -> (f64, f64) {
    let count = seq.entries.partition_point(|e| e.norm_f64() <= x);
    match count {
        0 => (f64::INFINITY, f64::INFINITY),
        k => {
            let b = seq.entries[k - 1].l_value.to_ball(96);
            (b.lower_f64(), b.upper_f64())
        }
    }
}

/// `psi <= L(X; S) <= phi` on a geometric grid, monotonicity of the `Phi_k`, and the two
/// consequences `L_i <= phi(X_{i+1})`, `X_i >= theta(X_{i+1})` on the entries in range.
pub fn check_sandwich(seq: &MinimalPointSequence, profile: &TransferenceProfile, opts: &SandwichOptions) -> Result<SandwichReport> {
    if profile.n != seq.n() {
        return Err(domain(format!("profile has n = {}, sequence has n = {}", profile.n, seq.n())));
    }
    let (x_min, x_max) = x_range(seq, profile, opts.x_min)?;
    let ed = profile.epsilon_delta()?;
    let mut grid = Vec::with_capacity(opts.grid_points);
    for x in geometric_grid(x_min, x_max, opts.grid_points) {
        let (env_lo, env_hi) = envelope_bounds(seq, x);
        let psi = profile.psi(x);
        let phi = profile.phi(x);
        if env_hi < psi * (1.0 - SLACK) {
            return Err(TransferenceError::SandwichViolated {
                x,
                detail: format!("L(X; S) <= {env_hi:e} is below psi(X) = {psi:e}"),
            });
        }
        if env_lo > phi * (1.0 + SLACK) {
            return Err(TransferenceError::SandwichViolated {
                x,
                detail: format!("L(X; S) >= {env_lo:e} is above phi(X) = {phi:e}"),
            });
        }
        let big_phi = (0..profile.n)
            .map(|k| Ok(phi_functions(profile, k, x)?.big_phi_k))
            .collect::<Result<Vec<f64>>>()?;
        grid.push(GridRow { x, psi, envelope: 0.5 * (env_lo + env_hi), phi, big_phi });
    }
    let big_phi_min: Vec<f64> = (0..profile.n)
        .map(|k| grid.iter().map(|g| g.big_phi[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let monotone = (0..profile.n)
        .map(|k| match profile.family {
            Family::Power => MonotoneCheck { k, increasing: !ed.eps_k[k].is_negative(), method: "analytic".into() },
            Family::PowerLog { .. } => MonotoneCheck {
                k,
                increasing: grid.windows(2).all(|w| w[1].big_phi[k] >= w[0].big_phi[k] * (1.0 - SLACK)),
                method: "grid (heuristic)".into(),
            },
        })
        .collect();
    let step_bounds = step_bound_rows(seq, profile, x_min, x_max)?;
    let step_bounds_pass = step_bounds.iter().all(|r| r.value_bound && r.norm_bound);
    Ok(SandwichReport {
        profile: profile.clone(),
        epsilon: ed.epsilon.to_string(),
        delta: ed.delta.to_string(),
        epsilon_nonnegative: !ed.epsilon.is_negative(),
        x_min,
        x_max,
        c_empirical: big_phi_min[profile.n - 1],
        big_phi_min,
        grid,
        monotone,
        step_bounds,
        step_bounds_pass,
    })
}

fn step_bound_rows(seq: &MinimalPointSequence, profile: &TransferenceProfile, x_min: f64, x_max: f64) -> Result<Vec<StepBoundRow>> {
    let e = &seq.entries;
    let mut rows = Vec::new();
    for i in 0..e.len().saturating_sub(1) {
        let (x_i, x_next) = (e[i].norm_f64(), e[i + 1].norm_f64());
        if x_i < x_min || x_next > x_max {
            continue;
        }
        let l_i = e[i].l_f64();
        let phi_next = profile.phi(x_next);
        let theta_next = profile.theta(x_next)?;
        rows.push(StepBoundRow {
            i,
            l_i,
            phi_next,
            x_i,
            theta_next,
            value_bound: l_i <= phi_next * (1.0 + SLACK),
            norm_bound: x_i >= theta_next * (1.0 - SLACK),
        });
    }
    Ok(rows)
}

/// Smallest `a` and largest `b` (padded by 1e-6 relative) with
/// `b X^-beta <= L(X; S) <= a X^-alpha` on `[x_min, X_max]`.
pub fn fit_power_constants(
    seq: &MinimalPointSequence,
    alpha: &BigRational,
    beta: &BigRational,
    x_min: Option<f64>,
) -> Result<(BigRational, BigRational)> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    let one = BigRational::one();
    let probe = TransferenceProfile::power(seq.n(), one.clone(), one, alpha.clone(), beta.clone())?;
    let (x_min, x_max) = x_range(seq, &probe, x_min)?;
    let (fa, fb) = (to_f64(alpha), to_f64(beta));
    let e = &seq.entries;
    let mut ln_a = f64::NEG_INFINITY;
    let mut ln_b = f64::INFINITY;
    for i in 0..e.len() {
        let left = e[i].norm_f64().max(x_min);
        let right = e.get(i + 1).map(|n| n.norm_f64()).unwrap_or(x_max).min(x_max);
        if right < x_min || left > x_max {
            continue;
        }
        let ln_l = e[i].ln_l();
        // L X^alpha peaks at the right end of each step, L X^beta bottoms at the left end
        ln_a = ln_a.max(ln_l + fa * right.ln());
        ln_b = ln_b.min(ln_l + fb * left.ln());
    }
    let a = decimal_rational((ln_a + 1e-6).exp(), true);
    let b = decimal_rational((ln_b - 1e-6).exp(), false);
    Ok((a, b))
}

/// A short decimal rational near `v`, rounded away from the violating side.
fn decimal_rational(v: f64, up: bool) -> BigRational {
    let e = v.log10().floor() as i32 - 8;
    let scale = 10f64.powi(-e);
    let m = if up { (v * scale).ceil() } else { (v * scale).floor() };
    let m = BigInt::from(m as i64);
    let ten = BigInt::from(10);
    if e >= 0 {
        BigRational::from_integer(m * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(m, num_traits::pow(ten, (-e) as usize))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub i0: usize,
    pub indices: Vec<usize>,
    /// `ln (Phi_0(X_{j_0+1}) ... Phi_0(X_{j_{n-1}+1}))`
    pub ln_lhs: f64,
    /// `ln (X_{j_1} ... X_{j_{n-1}} Phi_{n-1}(X_{j_{n-1}+1}))`
    pub ln_rhs: f64,
    pub holds: bool,
    /// The chain is only guaranteed when every `X_{j_t}` lies in the sandwich range and
    /// `Phi_0, ..., Phi_{n-2}` increase.
    pub hypotheses: bool,
}

/// The product inequality with `m = n` on the indices `i_0 < ... < i_{n-1}` of the family
/// starting at `i0`.
pub fn product_chain(seq: &MinimalPointSequence, profile: &TransferenceProfile, i0: usize, x_min: f64) -> Result<ChainReport> {
    let n = seq.n();
    let points = seq.points();
    let idx = select_indices(&points, i0, n)?;
    let last = idx[n - 1] + 1;
    if last >= seq.entries.len() {
        return Err(ConstructionError::InsufficientData(format!("entry {last} is missing")).into());
    }
    let ln_x = |i: usize| seq.entries[i].ln_norm();
    let ln_big_phi = |k: usize, u: f64| -> Result<f64> { Ok(u + profile.ln_phi_k_iterated(k, u)?) };
    let mut ln_lhs = 0.0;
    for &j in &idx {
        ln_lhs += ln_big_phi(0, ln_x(j + 1))?;
    }
    let mut ln_rhs = ln_big_phi(n - 1, ln_x(last))?;
    for &j in &idx[1..] {
        ln_rhs += ln_x(j);
    }
    let ed = profile.epsilon_delta()?;
    let increasing = match profile.family {
        Family::Power => ed.eps_k[..n - 1].iter().all(|e| !e.is_negative()),
        Family::PowerLog { .. } => true,
    };
    let hypotheses = increasing && seq.entries[idx[0]].norm_f64() >= x_min;
    let holds = ln_lhs <= ln_rhs + SLACK * (1.0 + ln_rhs.abs());
    Ok(ChainReport { i0, indices: idx, ln_lhs, ln_rhs, holds, hypotheses })
}

// ---------------------------------------------------------------------------------------
// extremal sequences

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub i: usize,
    /// Enclosure of the left side.
    pub lhs: [f64; 2],
    /// Enclosure of the right side.
    pub rhs: [f64; 2],
    pub exact_zero: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct DetRow {
    pub i: usize,
    pub det: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityRow {
    pub i: usize,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub beta: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub eps: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub c: BigRational,
    /// `(1/(4n)) (alpha/beta)^n min(alpha, beta - alpha)`, if `alpha <= beta`.
    pub eps_threshold: Option<String>,
    pub eps_within_threshold: bool,
    /// `1 - (alpha + alpha^2/beta + ... + alpha^n/beta^{n-1})`
    pub eps_of_exponents: String,
    pub condition_i: Vec<BoundRow>,
    pub condition_ii: Vec<BoundRow>,
    pub condition_iii: Vec<DetRow>,
    pub condition_iv: Vec<MinimalityRow>,
}

impl ExtremalReport {
    pub fn count(&self, which: usize, v: Verdict) -> usize {
        match which {
            1 => self.condition_i.iter().filter(|r| r.verdict == v).count(),
            2 => self.condition_ii.iter().filter(|r| r.verdict == v).count(),
            3 => self.condition_iii.iter().filter(|r| r.verdict == v).count(),
            4 => self.condition_iv.iter().filter(|r| r.verdict == v).count(),
            _ => 0,
        }
    }

    pub fn all_pass(&self) -> bool {
        (1..=4).all(|w| {
            self.count(w, Verdict::Fail) == 0 && self.count(w, Verdict::Undecided) == 0
        })
    }
}

/// Parameters of the bounds in conditions (i) and (ii).
#[derive(Clone, Debug)]
pub struct ExtremalParams {
    pub alpha: BigRational,
    pub beta: BigRational,
    pub eps: BigRational,
    pub c: BigRational,
}

impl ExtremalParams {
    fn validate(&self) -> Result<()> {
        check_positive("alpha", &self.alpha)?;
        check_positive("beta", &self.beta)?;
        if self.eps.is_negative() || self.c.is_negative() {
            return Err(domain("eps and C must be nonnegative"));
        }
        Ok(())
    }

    /// `C + 4 eps (beta/alpha)^p ln y`, as an enclosure.
    fn rhs(&self, p: u32, ln_y: f64) -> [f64; 2] {
        let c = to_f64(&self.c);
        if self.eps.is_zero() {
            return [c, c];
        }
        let r = to_f64(&self.beta) / to_f64(&self.alpha);
        let v = c + 4.0 * to_f64(&self.eps) * r.powi(p as i32) * ln_y;
        let slack = 1e-12 * (1.0 + v.abs());
        [v - slack, v + slack]
    }
}

fn verdict(lhs: [f64; 2], rhs: [f64; 2]) -> Verdict {
    if lhs[1] <= rhs[0] {
        Verdict::Pass
    } else if lhs[0] > rhs[1] {
        Verdict::Fail
    } else {
        Verdict::Undecided
    }
}

fn abs_enclosure(mid: f64, err: f64) -> [f64; 2] {
    let (lo, hi) = (mid - err, mid + err);
    if lo <= 0.0 && hi >= 0.0 {
        [0.0, lo.abs().max(hi.abs())]
    } else {
        [lo.abs().min(hi.abs()), lo.abs().max(hi.abs())]
    }
}

/// Bound on exponents for which exact power comparisons are attempted.
const EXACT_POW_LIMIT: u64 = 1 << 22;

fn small_pow(base: &BigInt, e: &BigInt) -> Option<BigInt> {
    let e = e.to_u64()?;
    if e.saturating_mul(base.bits().max(1)) > EXACT_POW_LIMIT {
        return None;
    }
    Some(num_traits::pow(base.clone(), e as usize))
}

/// Whether `||y'||^alpha = ||y||^beta` holds exactly, when that is cheap to decide.
fn norms_power_equal(n_next: &BigInt, n_cur: &BigInt, alpha: &BigRational, beta: &BigRational) -> Option<bool> {
    // N'^(a1 b2) = N^(b1 a2) with alpha = a1/a2 and beta = b1/b2
    let left = small_pow(n_next, &(alpha.numer() * beta.denom()))?;
    let right = small_pow(n_cur, &(beta.numer() * alpha.denom()))?;
    Some(left == right)
}

/// Whether `L ||y||^beta = 1` holds exactly, when `L` is rational and the powers are small.
fn value_power_one(l: &RigorousReal, n_sq: &BigInt, beta: &BigRational) -> Option<bool> {
    let q = l.is_exact_rational()?;
    if !q.is_positive() {
        return Some(false);
    }
    // (p/r)^(2 b2) N^(b1) = 1
    let two_b2 = beta.denom() * 2;
    let left = small_pow(q.numer(), &two_b2)? * small_pow(n_sq, beta.numer())?;
    let right = small_pow(q.denom(), &two_b2)?;
    Some(left == right)
}

fn ln_enclosure_of(l: &RigorousReal) -> Option<[f64; 2]> {
    let b = l.to_ball(96);
    let lo = b.lower();
    if lo.signum() <= 0 {
        return None;
    }
    let (a, c) = (ln_dyadic(&lo), ln_dyadic(&b.upper()));
    let pad = 1e-13 * (1.0 + a.abs().max(c.abs()));
    Some([a - pad, c + pad])
}

/// Conditions (i) and (ii) on squared norms and values `L(y_i)` alone.
pub fn check_growth_conditions(
    norms_sq: &[BigInt],
    values: &[RigorousReal],
    params: &ExtremalParams,
    n: usize,
) -> Result<(Vec<BoundRow>, Vec<BoundRow>)> {
    params.validate()?;
    if norms_sq.len() != values.len() {
        return Err(domain("norms and values differ in length"));
    }
    if norms_sq.iter().any(|v| !v.is_positive()) {
        return Err(domain("points must be nonzero"));
    }
    let (fa, fb) = (to_f64(&params.alpha), to_f64(&params.beta));
    let ln_y: Vec<f64> = norms_sq.iter().map(|v| ln_bigint(v) / 2.0).collect();
    let err = |v: f64| 1e-13 * (1.0 + v.abs());
    let mut cond_i = Vec::new();
    for i in 0..norms_sq.len().saturating_sub(1) {
        let rhs = params.rhs(n as u32, ln_y[i + 1]);
        let exact = norms_power_equal(&norms_sq[i + 1], &norms_sq[i], &params.alpha, &params.beta) == Some(true);
        let lhs = if exact {
            [0.0, 0.0]
        } else {
            let mid = fa * ln_y[i + 1] - fb * ln_y[i];
            abs_enclosure(mid, err(fa * ln_y[i + 1]) + err(fb * ln_y[i]))
        };
        cond_i.push(BoundRow { i, lhs, rhs, exact_zero: exact, verdict: verdict(lhs, rhs) });
    }
    let mut cond_ii = Vec::new();
    for i in 0..norms_sq.len() {
        let rhs = params.rhs(2, ln_y[i]);
        let exact = value_power_one(&values[i], &norms_sq[i], &params.beta) == Some(true);
        let (lhs, v) = if exact {
            ([0.0, 0.0], None)
        } else {
            match ln_enclosure_of(&values[i]) {
                Some([lo, hi]) => {
                    let b = fb * ln_y[i];
                    let mid = 0.5 * (lo + hi) + b;
                    (abs_enclosure(mid, 0.5 * (hi - lo) + err(b)), None)
                }
                None => ([0.0, f64::INFINITY], Some(Verdict::Undecided)),
            }
        };
        let verdict = v.unwrap_or_else(|| verdict(lhs, rhs));
        cond_ii.push(BoundRow { i, lhs, rhs, exact_zero: exact, verdict });
    }
    Ok((cond_i, cond_ii))
}

/// Condition (iii): `det(y_i, ..., y_{i+n})`, computed exactly.
pub fn check_determinants(points: &[IntegerPoint], n: usize) -> Vec<DetRow> {
    if points.len() < n + 1 {
        return Vec::new();
    }
    (0..=points.len() - n - 1)
        .map(|i| {
            let rows: Vec<IntVec> = points[i..=i + n].iter().map(|p| p.coords().to_vec()).collect();
            let det = linalg::det(&rows);
            let verdict = if det.is_zero() { Verdict::Fail } else { Verdict::Pass };
            DetRow { i, det: det.to_string(), verdict }
        })
        .collect()
}

/// Checks a candidate sequence `y_0, y_1, ...` against the four conditions, with (iv) read off
/// the minimal points in `seq`.
pub fn verify_extremal_sequence(
    points: &[IntegerPoint],
    seq: &MinimalPointSequence,
    params: &ExtremalParams,
) -> Result<ExtremalReport> {
    params.validate()?;
    let n = seq.n();
    if points.len() < n + 1 {
        return Err(TransferenceError::TooFewPoints { needed: n + 1, found: points.len() });
    }
    for p in points {
        seq.target.check_dim(p).map_err(MinpointsError::from)?;
        if p.is_zero() {
            return Err(domain("points must be nonzero"));
        }
    }
    let values = points
        .iter()
        .map(|p| seq.target.l_value(p, seq.cap).map_err(MinpointsError::from))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let norms: Vec<BigInt> = points.iter().map(|p| p.norm_sq().clone()).collect();
    let (condition_i, condition_ii) = check_growth_conditions(&norms, &values, params, n)?;
    let condition_iii = check_determinants(points, n);
    let matcher = seq.set.matcher();
    let exhausted_sq = &seq.exhausted_up_to * &seq.exhausted_up_to;
    let condition_iv = points
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (p, l))| {
            let row = |verdict, detail: String| MinimalityRow { i, verdict, detail };
            if !matcher.contains_up_to_sign(p) {
                return row(Verdict::Fail, "not in S".into());
            }
            if let Some(e) = seq.entries.iter().find(|e| &e.point == p) {
                return row(Verdict::Pass, format!("minimal point {}", e.index));
            }
            if BigRational::from_integer(p.norm_sq().clone()) > exhausted_sq {
                return row(Verdict::Undecided, "beyond the enumerated range".into());
            }
            let count = seq.entries.partition_point(|e| e.norm_sq() <= p.norm_sq());
            let Some(rec) = count.checked_sub(1).map(|k| &seq.entries[k]) else {
                return row(Verdict::Undecided, "below the first minimal point".into());
            };
            match compare(l, &rec.l_value, seq.cap) {
                Comparison::Greater => row(Verdict::Fail, format!("minimal point {} = {} has smaller L", rec.index, rec.point)),
                Comparison::Less => row(Verdict::Undecided, "beats the recorded envelope".into()),
                Comparison::Indistinguishable => row(Verdict::Undecided, "tie not resolved".into()),
            }
        })
        .collect();
    let threshold = eps_threshold(&params.alpha, &params.beta, n).ok();
    let eps_within_threshold = threshold.as_ref().is_some_and(|t| &params.eps <= t);
    let one = BigRational::one();
    let eps_of_exponents = epsilon_delta(&one, &one, &params.alpha, &params.beta, n)?.epsilon;
    Ok(ExtremalReport {
        n,
        alpha: params.alpha.clone(),
        beta: params.beta.clone(),
        eps: params.eps.clone(),
        c: params.c.clone(),
        eps_threshold: threshold.map(|t| t.to_string()),
        eps_within_threshold,
        eps_of_exponents: eps_of_exponents.to_string(),
        condition_i,
        condition_ii,
        condition_iii,
        condition_iv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn mm_form_examples() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((mm_lhs(g, 1.0, 2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(mm_lhs(0.3, f64::INFINITY, 4).unwrap(), 0.3);
        assert_eq!(mm_lhs_exact(&q(1, 2), Some(&q(1, 2)), 2).unwrap(), q(1, 1));
        assert!(mm_lhs(-0.1, 1.0, 2).is_err());
    }

    #[test]
    fn epsilon_delta_examples() {
        let one = q(1, 1);
        let ed = epsilon_delta(&one, &one, &q(1, 2), &q(1, 2), 2).unwrap();
        assert_eq!(ed.epsilon, q(0, 1));
        let ed = epsilon_delta(&one, &one, &q(1, 2), &q(1, 1), 2).unwrap();
        assert_eq!(ed.epsilon, q(1, 4));
        assert_eq!(ed.delta, q(1, 2));
        assert_eq!(ed.eps_k, vec![q(1, 2), q(1, 4)]);
        // epsilon is one minus the exponent form
        let lhs = mm_lhs_exact(&q(1, 2), Some(&q(1, 1)), 2).unwrap();
        assert_eq!(ed.epsilon, q(1, 1) - lhs);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(eps_threshold(&q(1, 2), &q(1, 1), 2).unwrap(), q(1, 64));
        assert_eq!(eps_threshold(&q(1, 3), &q(1, 3), 3).unwrap(), q(0, 1));
        assert!(eps_threshold(&q(2, 1), &q(1, 1), 2).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = TransferenceProfile::power(2, q(1, 1), q(7, 3), q(1, 2), q(5, 4)).unwrap();
        let v = phi_functions(&p, 0, 4.0).unwrap();
        assert!((v.big_phi_k - 2.0).abs() < 1e-12);
        let p = TransferenceProfile::power(2, q(1, 1), q(1, 1), q(1, 2), q(1, 1)).unwrap();
        let v = phi_functions(&p, 1, 16.0).unwrap();
        assert!((v.big_phi_k - 2.0).abs() < 1e-12);
        assert!(v.rel_diff.unwrap() < 1e-12);
        // identity theta
        let p = TransferenceProfile::power(3, q(3, 2), q(3, 2), q(2, 3), q(2, 3)).unwrap();
        let x = 37.0f64;
        let v = phi_functions(&p, 2, x).unwrap();
        assert!((v.phi_k / p.phi(x).powi(3) - 1.0).abs() < 1e-12);
        assert!(phi_functions(&p, 3, x).is_err());
    }

    #[test]
    fn power_log_theta_inverts() {
        let p = TransferenceProfile::power_log(2, q(2, 1), q(1, 2), q(1, 2), q(1, 1), 1.0, 2.0).unwrap();
        for x in [p.threshold, 1e3, 1e6, 1e12] {
            let t = p.theta(x.max(p.threshold)).unwrap();
            let rel = (p.psi(t) / p.phi(x.max(p.threshold)) - 1.0).abs();
            assert!(rel < 1e-9, "x = {x}: {rel}");
        }
        assert!(p.ln_phi_k_closed(1, 3.0).is_none());
    }

    #[test]
    fn synthetic_power_law_is_exact() {
        // ||y_{i+1}|| = ||y_i||^2 and L(y_i) = ||y_i||^-2 with alpha = 1, beta = 2
        let norms: Vec<BigInt> = (0..6).map(|i| BigInt::from(2).pow(2u32 << i)).collect();
        let values: Vec<RigorousReal> = norms.iter().map(|n| RigorousReal::rational(BigRational::new(1.into(), n.clone()))).collect();
        let params = ExtremalParams { alpha: q(1, 1), beta: q(2, 1), eps: q(0, 1), c: q(0, 1) };
        let (ci, cii) = check_growth_conditions(&norms, &values, &params, 2).unwrap();
        assert!(ci.iter().all(|r| r.verdict == Verdict::Pass && r.exact_zero));
        assert!(cii.iter().all(|r| r.verdict == Verdict::Pass && r.exact_zero));
        // the estimator on the same data: lambda = 2, lambda_hat = 1
        let ln_x: Vec<f64> = norms.iter().map(|n| ln_bigint(n) / 2.0).collect();
        let ln_l: Vec<f64> = ln_x.iter().map(|v| -2.0 * v).collect();
        let mut lx = ln_x.clone();
        let mut ll = ln_l.clone();
        for i in 6..12 {
            lx.push(2f64.powi(i) * 2f64.ln());
            ll.push(-2.0 * lx[i as usize]);
        }
        let est = estimate_from_logs(&lx, &ll, &q(1, 1)).unwrap();
        assert!((est.lambda - 2.0).abs() < 1e-12);
        assert!((est.lambda_hat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn determinant_condition() {
        let pts: Vec<IntegerPoint> = [[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]]
            .iter()
            .map(|r| IntegerPoint::from_i64(r))
            .collect();
        let rows = check_determinants(&pts, 2);
        assert_eq!(rows[0].verdict, Verdict::Fail);
        assert_eq!(rows[0].det, "0");
        assert_eq!(rows[1].verdict, Verdict::Pass);
    }

    #[test]
    fn too_few_points() {
        let lx: Vec<f64> = (1..15).map(|i| i as f64).collect();
        let ll: Vec<f64> = lx.iter().map(|v| -v).collect();
        assert!(matches!(
            estimate_from_logs(&lx, &ll, &q(1, 2)),
            Err(TransferenceError::TooFewPoints { needed: 10, found: 7 })
        ));
    }

    #[test]
    fn grid_ends_at_bounds() {
        let g = geometric_grid(2.0, 1e5, 50);
        assert_eq!(g.len(), 50);
        assert_eq!(g[49], 1e5);
        assert!((g[0] - 2.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn decimal_rounding_direction() {
        let v = 0.123456789123;
        assert!(to_f64(&decimal_rational(v, true)) >= v);
        assert!(to_f64(&decimal_rational(v, false)) <= v);
    }
}
