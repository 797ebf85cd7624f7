//! Midpoint-radius intervals over dyadic numbers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::dyadic::{Dyadic, Round};

const RADIUS_BITS: u64 = 32;

/// The closed interval `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub mid: Dyadic,
    pub rad: Dyadic,
}

fn round_mid(exact: Dyadic, prec: u64) -> (Dyadic, Dyadic) {
    let rounded = exact.round(prec, Round::Nearest);
    let err = exact.sub(&rounded).abs();
    (rounded, err)
}

impl Ball {
    pub fn exact(mid: Dyadic) -> Self {
        Ball { mid, rad: Dyadic::zero() }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Ball::exact(Dyadic::from_int(v.into()))
    }

    pub fn new(mid: Dyadic, rad: Dyadic) -> Self {
        debug_assert!(rad.signum() >= 0);
        Ball { mid, rad: rad.round(RADIUS_BITS, Round::Up) }
    }

    /// Enclosure of a rational with `prec` bits in the midpoint.
    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        let mid = Dyadic::from_rational(q, prec, Round::Nearest);
        let err = (q - mid.to_rational()).abs();
        let rad = if err.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::from_rational(&err, RADIUS_BITS, Round::Up)
        };
        Ball { mid, rad }
    }

    /// Enclosure of `[mid - rad, mid + rad]` for rational data, widened outward.
    pub fn from_rational_ball(mid: &BigRational, rad: &BigRational, prec: u64) -> Self {
        let b = Ball::from_rational(mid, prec);
        if rad.is_zero() {
            return b;
        }
        let extra = Dyadic::from_rational(rad, RADIUS_BITS, Round::Up);
        Ball::new(b.mid, b.rad.add(&extra))
    }

    /// Smallest ball containing `[lo, hi]`.
    pub fn from_endpoints(lo: &Dyadic, hi: &Dyadic, prec: u64) -> Self {
        let sum = lo.add(hi);
        let mid_exact = sum.mul_pow2(-1);
        let (mid, err) = round_mid(mid_exact.clone(), prec);
        let half_width = hi.sub(lo).mul_pow2(-1);
        Ball::new(mid, half_width.add(&err))
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        let lo = self.lower().to_rational();
        let hi = self.upper().to_rational();
        &lo <= q && q <= &hi
    }

    /// `Some(ordering)` when the intervals are disjoint, or both are the same exact point.
    pub fn certain_cmp(&self, other: &Ball) -> Option<Ordering> {
        if self.upper() < other.lower() {
            Some(Ordering::Less)
        } else if self.lower() > other.upper() {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() && self.mid == other.mid {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: self.mid.neg(), rad: self.rad.clone() }
    }

    pub fn add(&self, other: &Ball, prec: u64) -> Ball {
        let (mid, err) = round_mid(self.mid.add(&other.mid), prec);
        Ball::new(mid, self.rad.add(&other.rad).add(&err))
    }

    pub fn sub(&self, other: &Ball, prec: u64) -> Ball {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Ball, prec: u64) -> Ball {
        let (mid, err) = round_mid(self.mid.mul(&other.mid), prec);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad))
            .add(&err);
        Ball::new(mid, rad)
    }

    pub fn mul_int(&self, k: &BigInt, prec: u64) -> Ball {
        let (mid, err) = round_mid(self.mid.mul_int(k), prec);
        let rad = self.rad.mul_int(&k.abs()).add(&err);
        Ball::new(mid, rad)
    }

    /// Reciprocal; `None` when the ball contains zero.
    pub fn recip(&self, prec: u64) -> Option<Ball> {
        if self.contains_zero() {
            return None;
        }
        let lo = self.lower().to_rational();
        let hi = self.upper().to_rational();
        // 1/x is decreasing on each half-line
        let (a, b) = (hi.recip(), lo.recip());
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let lo_d = Dyadic::from_rational(&a, prec + 2, Round::Down);
        let hi_d = Dyadic::from_rational(&b, prec + 2, Round::Up);
        Some(Ball::from_endpoints(&lo_d, &hi_d, prec))
    }

    pub fn div(&self, other: &Ball, prec: u64) -> Option<Ball> {
        if self.is_exact() && other.is_exact() && !other.mid.is_zero() {
            let q = self.mid.to_rational() / other.mid.to_rational();
            return Some(Ball::from_rational(&q, prec));
        }
        other.recip(prec + 4).map(|r| self.mul(&r, prec))
    }

    pub fn abs(&self) -> Ball {
        if self.lower().signum() >= 0 {
            self.clone()
        } else if self.upper().signum() <= 0 {
            self.neg()
        } else {
            // straddles zero: [0, max(|lo|, |hi|)]
            let top = self.mid.abs().add(&self.rad);
            let half = top.mul_pow2(-1);
            Ball::new(half.clone(), half)
        }
    }

    /// Enclosure of `max(x, y)` for every `x` in `self`, `y` in `other`.
    pub fn max(&self, other: &Ball, prec: u64) -> Ball {
        match self.certain_cmp(other) {
            Some(Ordering::Less) => other.clone(),
            Some(_) => self.clone(),
            None => {
                let lo = std::cmp::max(self.lower(), other.lower());
                let hi = std::cmp::max(self.upper(), other.upper());
                Ball::from_endpoints(&lo, &hi, prec)
            }
        }
    }

    pub fn min(&self, other: &Ball, prec: u64) -> Ball {
        self.neg().max(&other.neg(), prec).neg()
    }

    /// Largest radius allowed by the refinement contract: `2^-bits * max(1, |mid|)`.
    pub fn meets_precision(&self, bits: u64) -> bool {
        let scale = if self.mid.magnitude() > 1 {
            Dyadic::pow2(self.mid.magnitude())
        } else {
            Dyadic::pow2(0)
        };
        // |mid| < 2^magnitude, so compare against a slightly smaller bound
        let bound = scale.mul_pow2(-(bits as i64) - 1);
        self.rad <= bound
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower().to_f64_directed(Round::Down)
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper().to_f64_directed(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_contains_exact_results() {
        let a = Ball::from_rational(&q(1, 3), 64);
        let b = Ball::from_rational(&q(-2, 7), 64);
        assert!(a.add(&b, 64).contains(&(q(1, 3) + q(-2, 7))));
        assert!(a.mul(&b, 64).contains(&(q(1, 3) * q(-2, 7))));
        assert!(a.div(&b, 64).unwrap().contains(&(q(1, 3) / q(-2, 7))));
        assert!(b.abs().contains(&q(2, 7)));
    }

    #[test]
    fn recip_of_zero_ball_is_none() {
        let z = Ball::new(Dyadic::zero(), Dyadic::pow2(-3));
        assert!(z.recip(64).is_none());
    }

    #[test]
    fn abs_of_straddling_ball_covers_both_sides() {
        let b = Ball::new(Dyadic::from_rational(&q(1, 8), 10, Round::Nearest), Dyadic::pow2(-1));
        let a = b.abs();
        assert!(a.contains(&q(0, 1)));
        assert!(a.contains(&q(5, 8)));
        assert!(a.contains(&q(3, 8)));
    }

    #[test]
    fn max_encloses_both_candidates() {
        let a = Ball::new(Dyadic::from_int(1), Dyadic::pow2(-1));
        let b = Ball::new(Dyadic::from_rational(&q(5, 4), 10, Round::Nearest), Dyadic::pow2(-2));
        let m = a.max(&b, 64);
        assert!(m.contains(&q(3, 2)));
        assert!(m.contains(&q(1, 1)));
        assert!(!m.contains(&q(1, 2)));
    }
}
