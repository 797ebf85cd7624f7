//! The boundary of the admissible exponent region and the algebraic-coordinate preset.
//!
//! `lambda_n` is the positive root of `x + (n-1) x^2 + ... + (n-1)^{n-1} x^n = 1`; for a
//! point `(1, theta, ..., theta^{n-1}, xi)` with `theta` algebraic of degree `n` the uniform
//! exponent cannot exceed it.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::minpoints::{enumerate_with, EnumerationOptions, MinimalPointSequence, MinpointsError};
use crate::model::{ApproxSet, Independence, ModelError, TargetPoint};
use crate::rigorous::{Op, RigorousError, RigorousReal};
use crate::transference::{estimate_exponents, mm_lhs, TransferenceError};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Rigorous(#[from] RigorousError),
    #[error(transparent)]
    Minpoints(#[from] MinpointsError),
    #[error(transparent)]
    Transference(#[from] TransferenceError),
}

impl From<ModelError> for SpectraError {
    fn from(e: ModelError) -> Self {
        SpectraError::Minpoints(e.into())
    }
}

type Result<T> = std::result::Result<T, SpectraError>;

/// Coefficients (lowest degree first) of `(n-1)^{n-1} x^n + ... + (n-1) x^2 + x - 1`.
pub fn lambda_polynomial(n: usize) -> Vec<BigInt> {
    let m = BigInt::from(n as i64 - 1);
    let mut coeffs = vec![-BigInt::one()];
    let mut c = BigInt::one();
    for _ in 1..=n {
        coeffs.push(c.clone());
        c *= &m;
    }
    coeffs
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaN {
    pub n: usize,
    pub lower: String,
    pub upper: String,
    pub value: f64,
    #[serde(skip)]
    pub enclosure: (BigRational, BigRational),
}

/// An enclosure of width at most `tol` of `lambda_n`.
pub fn lambda_n(n: usize, tol: &BigRational) -> Result<LambdaN> {
    if n < 2 {
        return Err(SpectraError::Domain(format!("lambda_n needs n >= 2, got {n}")));
    }
    if !tol.is_positive() {
        return Err(SpectraError::Domain("tolerance must be positive".into()));
    }
    // the polynomial increases on x > 0, is -1 at 0 and at least 0 at 1
    let root = RigorousReal::algebraic(&lambda_polynomial(n), BigRational::zero(), BigRational::one())?;
    // radius <= 2^-bits since the root is below 1
    let bits = bits_for(tol) + 1;
    let r = root.refine(bits)?;
    let enc = r.enclosure();
    let (lo, hi) = (enc.lower(), enc.upper());
    Ok(LambdaN {
        n,
        lower: lo.to_string(),
        upper: hi.to_string(),
        value: r.to_f64(),
        enclosure: (lo, hi),
    })
}

fn bits_for(tol: &BigRational) -> u64 {
    let mut bits = 1u64;
    let mut p = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    while &p > tol {
        p *= &half;
        bits += 1;
    }
    bits
}

/// `lambda_n` as an algebraic number, for exact downstream use.
pub fn lambda_n_real(n: usize) -> Result<RigorousReal> {
    if n < 2 {
        return Err(SpectraError::Domain(format!("lambda_n needs n >= 2, got {n}")));
    }
    Ok(RigorousReal::algebraic(&lambda_polynomial(n), BigRational::zero(), BigRational::one())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Frontier {
    Finite(f64),
    Infinite,
}

impl Frontier {
    pub fn to_f64(self) -> f64 {
        match self {
            Frontier::Finite(v) => v,
            Frontier::Infinite => f64::INFINITY,
        }
    }
}

/// The `lambda >= lambda_hat` where the exponent form equals 1, by bisection.
pub fn frontier(lambda_hat: f64, n: usize) -> Result<Frontier> {
    if n < 2 {
        return Err(SpectraError::Domain(format!("frontier needs n >= 2, got {n}")));
    }
    let lo_bound = 1.0 / n as f64;
    // accept the endpoint 1/n up to rounding of the caller's value
    if !(lambda_hat >= lo_bound * (1.0 - 1e-15)) || !(lambda_hat <= 1.0) {
        return Err(SpectraError::Domain(format!("lambda_hat = {lambda_hat} outside [1/{n}, 1]")));
    }
    // the limit lambda -> infinity of the form is lambda_hat itself
    if lambda_hat >= 1.0 {
        return Ok(Frontier::Infinite);
    }
    let g = |l: f64| mm_lhs(lambda_hat, l, n).map(|v| v - 1.0);
    let mut lo = lambda_hat;
    if g(lo)? <= 0.0 {
        return Ok(Frontier::Finite(lo));
    }
    let mut hi = lo.max(1.0) * 2.0;
    while g(hi)? > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Ok(Frontier::Infinite);
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Frontier::Finite(0.5 * (lo + hi)))
}

/// `lambda_hat, lambda` on `grid` evenly spaced points of `[1/n, 1]`.
pub fn frontier_csv(n: usize, grid: usize) -> Result<String> {
    if grid < 2 {
        return Err(SpectraError::Domain("the grid needs at least 2 points".into()));
    }
    let mut out = String::from("lambda_hat,lambda\n");
    let lo = 1.0 / n as f64;
    for j in 0..grid {
        let lh = if j + 1 == grid { 1.0 } else { lo + (1.0 - lo) * j as f64 / (grid - 1) as f64 };
        let l = match frontier(lh, n)? {
            Frontier::Finite(v) => format!("{v:.14e}"),
            Frontier::Infinite => "inf".to_string(),
        };
        let _ = writeln!(out, "{lh:.14e},{l}");
    }
    Ok(out)
}

/// `n, lambda_n` for `n = 2..=n_max`.
pub fn lambda_csv(n_max: usize) -> Result<String> {
    let tol = BigRational::new(1.into(), BigInt::from(10).pow(15));
    let mut out = String::from("n,lambda_n\n");
    for n in 2..=n_max.max(2) {
        let l = lambda_n(n, &tol)?;
        let _ = writeln!(out, "{n},{:.14e}", l.value);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleReport {
    pub n: usize,
    pub x_max: String,
    pub entries: usize,
    /// `min_i X_i^{1/(n-1)} L_i`, the infimum of `X^{1/(n-1)} L(X)` over the enumerated range.
    pub c2_inf: f64,
    pub c2_index: usize,
    pub lambda_hat_est: f64,
    /// Fraction of the entries the estimate was taken over.
    pub tail_fraction: String,
    pub lambda_n: f64,
    /// `lambda_n - lambda_hat_est`
    pub margin: f64,
}

/// `(1, theta, ..., theta^{n-1}, extra)` with `theta` algebraic of degree `n`.
pub fn liouville_target(theta: &RigorousReal, degree: usize, extra: &RigorousReal) -> Result<TargetPoint> {
    if degree < 2 {
        return Err(SpectraError::Domain(format!("theta must have degree >= 2, got {degree}")));
    }
    let mut coords = vec![RigorousReal::integer(1)];
    let mut p = RigorousReal::integer(1);
    for _ in 1..degree {
        p = RigorousReal::expr(Op::Mul, vec![p, theta.clone()])?;
        coords.push(p.clone());
    }
    coords.push(extra.clone());
    Ok(TargetPoint::new(coords, Independence::Asserted)?)
}

/// Enumerates the preset target and reports the scaling of `L(X)` and the uniform estimate.
pub fn liouville_preset(
    theta: &RigorousReal,
    degree: usize,
    extra: &RigorousReal,
    x_max: &BigRational,
    opts: &EnumerationOptions,
) -> Result<(LiouvilleReport, MinimalPointSequence)> {
    let xi = liouville_target(theta, degree, extra)?;
    let seq = enumerate_with(&xi, &ApproxSet::Full, x_max, opts)?;
    let scale = 1.0 / (degree as f64 - 1.0);
    let (c2_index, c2_inf) = seq
        .entries
        .iter()
        .map(|e| (e.index, (scale * e.ln_norm() + e.ln_l()).exp()))
        .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    let half = BigRational::new(1.into(), 2.into());
    let (lambda_hat_est, fraction) = match estimate_exponents(&seq, &half) {
        Ok(e) => (e.lambda_hat, half),
        Err(TransferenceError::TooFewPoints { .. }) => {
            let all = BigRational::one();
            (short_lambda_hat(&seq), all)
        }
        Err(e) => return Err(e.into()),
    };
    let tol = BigRational::new(1.into(), BigInt::from(10).pow(15));
    let ln = lambda_n(degree, &tol)?.value;
    let report = LiouvilleReport {
        n: degree,
        x_max: x_max.to_string(),
        entries: seq.len(),
        c2_inf,
        c2_index,
        lambda_hat_est,
        tail_fraction: fraction.to_string(),
        lambda_n: ln,
        margin: ln - lambda_hat_est,
    };
    Ok((report, seq))
}

/// `min_i -ln L_i / ln X_{i+1}` over all steps with `X_{i+1} > 1`.
fn short_lambda_hat(seq: &MinimalPointSequence) -> f64 {
    seq.entries
        .windows(2)
        .filter(|w| w[1].ln_norm() > 0.0)
        .map(|w| -w[0].ln_l() / w[1].ln_norm())
        .fold(f64::INFINITY, f64::min)
}

/// `to_f64` of both ends of an enclosure, for reports.
pub fn enclosure_f64(e: &(BigRational, BigRational)) -> (f64, f64) {
    (e.0.to_f64().unwrap_or(f64::NAN), e.1.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> BigRational {
        BigRational::new(1.into(), BigInt::from(10).pow(14))
    }

    #[test]
    fn golden_ratio() {
        let l = lambda_n(2, &tol()).unwrap();
        assert!((l.value - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-13);
        let (lo, hi) = &l.enclosure;
        assert!(hi - lo <= tol());
    }

    #[test]
    fn lambda_3_root() {
        let l = lambda_n(3, &tol()).unwrap();
        let x = l.value;
        assert!((x + 2.0 * x * x + 4.0 * x * x * x - 1.0).abs() < 1e-12);
        assert!((x - 0.4052).abs() < 1e-3);
    }

    #[test]
    fn lambda_decreases_in_n() {
        let v: Vec<f64> = (2..=10).map(|n| lambda_n(n, &tol()).unwrap().value).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn frontier_examples() {
        assert_eq!(frontier(0.5, 2).unwrap(), Frontier::Finite(0.5));
        assert!((frontier(0.6, 2).unwrap().to_f64() - 0.9).abs() < 1e-12);
        assert!((frontier(0.6180339887, 2).unwrap().to_f64() - 1.0).abs() < 1e-9);
        assert_eq!(frontier(1.0, 3).unwrap(), Frontier::Infinite);
        assert!(frontier(0.2, 3).is_err());
    }

    #[test]
    fn csv_tables() {
        let t = frontier_csv(2, 5).unwrap();
        assert_eq!(t.lines().count(), 6);
        assert!(t.trim_end().ends_with(",inf"));
        let t = lambda_csv(4).unwrap();
        assert!(t.contains("\n2,6.18033988749895e-1\n"));
    }
}
