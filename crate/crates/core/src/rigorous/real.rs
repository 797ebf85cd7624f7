use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ball::Ball;
use super::dyadic::{Dyadic, Round};
use super::poly::IntPoly;
use super::{RigorousError, DEFAULT_PRECISION_CAP};

/// First precision tried by [`compare`]; later attempts double it.
pub const START_BITS: u64 = 64;

/// A rational midpoint-radius enclosure `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub mid: BigRational,
    pub rad: BigRational,
}

impl Enclosure {
    pub fn exact(q: BigRational) -> Self {
        Enclosure { mid: q, rad: BigRational::zero() }
    }

    pub fn from_ball(b: &Ball) -> Self {
        Enclosure { mid: b.mid.to_rational(), rad: b.rad.to_rational() }
    }

    pub fn to_ball(&self, prec: u64) -> Ball {
        Ball::from_rational_ball(&self.mid, &self.rad, prec)
    }

    pub fn lower(&self) -> BigRational {
        &self.mid - &self.rad
    }

    pub fn upper(&self) -> BigRational {
        &self.mid + &self.rad
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        (q - &self.mid).abs() <= self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }
}

/// Arithmetic node kinds available to expression descriptors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Abs,
    Max,
}

impl Op {
    fn arity(self) -> Option<usize> {
        match self {
            Op::Neg | Op::Abs => Some(1),
            Op::Sub | Op::Div => Some(2),
            Op::Add | Op::Mul | Op::Max => None,
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Rational(BigRational),
    Algebraic {
        poly: IntPoly,
        isolating: (BigRational, BigRational),
        bracket: (BigRational, BigRational),
    },
    Decimal {
        text: String,
    },
    Expr {
        op: Op,
        args: Vec<RigorousReal>,
    },
}

/// A real number together with a certified enclosure that can be tightened on demand.
///
/// Values are immutable; refinement returns a new value sharing the descriptor.
#[derive(Clone, Debug)]
pub struct RigorousReal {
    node: Arc<Node>,
    enclosure: Enclosure,
    bits: u64,
    literal_floor: bool,
}

/// Outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Greater,
    Indistinguishable,
}

impl Comparison {
    pub fn reverse(self) -> Self {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            Comparison::Indistinguishable => Comparison::Indistinguishable,
        }
    }

    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Indistinguishable => None,
        }
    }
}

fn pow2_rational(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Largest radius allowed at `bits`: `2^-bits * max(1, |m|)` where `m` is the smaller
/// endpoint magnitude (a lower bound on the value's magnitude).
fn radius_target(enc: &Enclosure, bits: u64) -> BigRational {
    let lo_mag = (enc.mid.abs() - &enc.rad).max(BigRational::zero());
    let scale = if lo_mag > BigRational::one() { lo_mag } else { BigRational::one() };
    scale * pow2_rational(-(bits as i64))
}

fn meets(enc: &Enclosure, bits: u64) -> bool {
    enc.rad <= radius_target(enc, bits)
}

/// A dyadic strictly between `lo` and `hi`, near their midpoint.
fn dyadic_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let mid = (lo + hi) / BigRational::from_integer(2.into());
    let width = hi - lo;
    // enough bits so the rounding error is below a quarter of the width
    let mag = |q: &BigRational| q.numer().bits() as i64 - q.denom().bits() as i64;
    let need = (mag(&mid) - mag(&width) + 4).max(8) as u64;
    let cand = Dyadic::from_rational(&mid, need, Round::Nearest).to_rational();
    if &cand > lo && &cand < hi {
        cand
    } else {
        mid
    }
}

impl RigorousReal {
    fn leaf(node: Node, enclosure: Enclosure, bits: u64, literal_floor: bool) -> Self {
        RigorousReal { node: Arc::new(node), enclosure, bits, literal_floor }
    }

    pub fn rational(q: BigRational) -> Self {
        let enc = Enclosure::exact(q.clone());
        RigorousReal::leaf(Node::Rational(q), enc, u64::MAX, false)
    }

    pub fn integer(v: impl Into<BigInt>) -> Self {
        RigorousReal::rational(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        RigorousReal::rational(BigRational::new(num.into(), den.into()))
    }

    /// The unique root of `minpoly` (coefficients lowest degree first) in `[lo, hi]`.
    pub fn algebraic(
        minpoly: &[BigInt],
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Self, RigorousError> {
        let poly = IntPoly::new(minpoly.to_vec());
        if poly.is_zero() {
            return Err(RigorousError::ZeroPolynomial);
        }
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        if !poly.is_square_free() {
            return Err(RigorousError::NotSquareFree);
        }
        let at_lo = poly.sign_at(&lo) == 0;
        let roots = poly.count_roots(&lo, &hi) + usize::from(at_lo && lo != hi);
        if roots != 1 {
            return Err(RigorousError::NoSignChange { roots });
        }
        if at_lo {
            return Ok(RigorousReal::rational(lo));
        }
        if poly.sign_at(&hi) == 0 {
            return Ok(RigorousReal::rational(hi));
        }
        let enc = Enclosure {
            mid: (&lo + &hi) / BigRational::from_integer(2.into()),
            rad: (&hi - &lo) / BigRational::from_integer(2.into()),
        };
        let node = Node::Algebraic { poly, isolating: (lo.clone(), hi.clone()), bracket: (lo, hi) };
        Ok(RigorousReal::leaf(node, enc, 0, false))
    }

    /// Convenience wrapper over [`RigorousReal::algebraic`] with small integer inputs.
    pub fn algebraic_i64(minpoly: &[i64], lo: (i64, i64), hi: (i64, i64)) -> Result<Self, RigorousError> {
        let coeffs: Vec<BigInt> = minpoly.iter().map(|&c| BigInt::from(c)).collect();
        RigorousReal::algebraic(
            &coeffs,
            BigRational::new(lo.0.into(), lo.1.into()),
            BigRational::new(hi.0.into(), hi.1.into()),
        )
    }

    /// `sqrt(n)` for a non-negative integer; exact when `n` is a perfect square.
    pub fn sqrt_int(n: &BigInt) -> Self {
        assert!(!n.is_negative(), "sqrt of a negative integer");
        let r = n.sqrt();
        if &(&r * &r) == n {
            return RigorousReal::integer(r);
        }
        let coeffs = vec![-n.clone(), BigInt::zero(), BigInt::one()];
        RigorousReal::algebraic(
            &coeffs,
            BigRational::from_integer(r.clone()),
            BigRational::from_integer(r + 1),
        )
        .expect("integer square root bracket isolates")
    }

    /// A decimal literal such as `"1.41421356"` or `"-2.5e-3"`, carrying half a unit in the
    /// last stated digit as its radius.
    pub fn decimal(text: &str) -> Result<Self, RigorousError> {
        let (value, half_ulp) = parse_decimal(text)?;
        let enc = Enclosure { mid: value, rad: half_ulp };
        let node = Node::Decimal { text: text.trim().to_string() };
        Ok(RigorousReal::leaf(node, enc, 0, true))
    }

    pub fn expr(op: Op, args: Vec<RigorousReal>) -> Result<Self, RigorousError> {
        if args.is_empty() || op.arity().is_some_and(|a| a != args.len()) {
            return Err(RigorousError::Arity { op: format!("{op:?}"), got: args.len() });
        }
        let literal_floor = args.iter().any(|a| a.literal_floor);
        let bits = args.iter().map(|a| a.bits).min().unwrap_or(0);
        let enclosure = combine(op, &args, bits.clamp(START_BITS, 4 * START_BITS))?;
        Ok(RigorousReal { node: Arc::new(Node::Expr { op, args }), enclosure, bits, literal_floor })
    }

    pub fn add(&self, other: &RigorousReal) -> Self {
        RigorousReal::expr(Op::Add, vec![self.clone(), other.clone()]).expect("binary add")
    }

    pub fn sub(&self, other: &RigorousReal) -> Self {
        RigorousReal::expr(Op::Sub, vec![self.clone(), other.clone()]).expect("binary sub")
    }

    pub fn mul(&self, other: &RigorousReal) -> Self {
        RigorousReal::expr(Op::Mul, vec![self.clone(), other.clone()]).expect("binary mul")
    }

    pub fn div(&self, other: &RigorousReal) -> Result<Self, RigorousError> {
        RigorousReal::expr(Op::Div, vec![self.clone(), other.clone()])
    }

    pub fn neg(&self) -> Self {
        RigorousReal::expr(Op::Neg, vec![self.clone()]).expect("unary neg")
    }

    pub fn abs(&self) -> Self {
        RigorousReal::expr(Op::Abs, vec![self.clone()]).expect("unary abs")
    }

    pub fn max_of(values: Vec<RigorousReal>) -> Result<Self, RigorousError> {
        RigorousReal::expr(Op::Max, values)
    }

    pub fn scale_int(&self, k: impl Into<BigInt>) -> Self {
        self.mul(&RigorousReal::integer(k))
    }

    pub fn enclosure(&self) -> &Enclosure {
        &self.enclosure
    }

    /// Precision (bits) that the current enclosure was computed for.
    pub fn precision(&self) -> u64 {
        self.bits
    }

    pub fn is_exact_rational(&self) -> Option<&BigRational> {
        match &*self.node {
            Node::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// True when the value depends on a decimal literal, whose radius cannot shrink.
    pub fn has_literal_floor(&self) -> bool {
        self.literal_floor
    }

    pub fn to_f64(&self) -> f64 {
        Dyadic::from_rational(&self.enclosure.mid, 60, Round::Nearest).to_f64()
    }

    pub fn to_ball(&self, prec: u64) -> Ball {
        self.enclosure.to_ball(prec)
    }

    /// Refine with the default precision cap.
    pub fn refine(&self, bits: u64) -> Result<RigorousReal, RigorousError> {
        self.refine_with_cap(bits, DEFAULT_PRECISION_CAP)
    }

    /// A new value whose radius is at most `2^-bits * max(1, |value|)`.
    ///
    /// Values built on decimal literals cannot go below the literal's stated radius; for
    /// those the best available enclosure is returned instead.
    pub fn refine_with_cap(&self, bits: u64, cap: u64) -> Result<RigorousReal, RigorousError> {
        if bits > cap {
            return Err(RigorousError::PrecisionCapExceeded { requested: bits, cap });
        }
        if self.bits >= bits && (meets(&self.enclosure, bits) || self.literal_floor) {
            return Ok(self.clone());
        }
        match &*self.node {
            Node::Rational(_) => Ok(self.clone()),
            Node::Decimal { .. } => Ok(self.clone()),
            Node::Algebraic { poly, isolating, bracket } => {
                let (lo, hi) = refine_root(poly, bracket, bits);
                let enc = Enclosure {
                    mid: (&lo + &hi) / BigRational::from_integer(2.into()),
                    rad: (&hi - &lo) / BigRational::from_integer(2.into()),
                };
                let node = Node::Algebraic { poly: poly.clone(), isolating: isolating.clone(), bracket: (lo, hi) };
                Ok(RigorousReal::leaf(node, enc, bits, false))
            }
            Node::Expr { op, args } => {
                let mut guard = 16u64;
                loop {
                    let child_bits = (bits + guard).min(cap);
                    let refined = args
                        .iter()
                        .map(|a| a.refine_with_cap(child_bits, cap))
                        .collect::<Result<Vec<_>, _>>()?;
                    let enc = combine(*op, &refined, child_bits + 8)?;
                    if meets(&enc, bits) || self.literal_floor {
                        return Ok(RigorousReal {
                            node: Arc::new(Node::Expr { op: *op, args: refined }),
                            enclosure: enc,
                            bits,
                            literal_floor: self.literal_floor,
                        });
                    }
                    if child_bits >= cap {
                        return Err(RigorousError::PrecisionCapExceeded { requested: bits + guard, cap });
                    }
                    guard *= 2;
                }
            }
        }
    }

    /// One evaluation pass at roughly `bits` of precision, without enforcing the radius
    /// contract. Used by comparison escalation.
    pub fn approximate(&self, bits: u64) -> Result<RigorousReal, RigorousError> {
        if self.bits >= bits {
            return Ok(self.clone());
        }
        match &*self.node {
            Node::Rational(_) | Node::Decimal { .. } | Node::Algebraic { .. } => {
                self.refine_with_cap(bits, u64::MAX)
            }
            Node::Expr { op, args } => {
                let refined = args
                    .iter()
                    .map(|a| a.approximate(bits + 16))
                    .collect::<Result<Vec<_>, _>>()?;
                let enc = combine(*op, &refined, bits + 24)?;
                Ok(RigorousReal {
                    node: Arc::new(Node::Expr { op: *op, args: refined }),
                    enclosure: enc,
                    bits,
                    literal_floor: self.literal_floor,
                })
            }
        }
    }

    /// Textual descriptor, used in reports.
    pub fn describe(&self) -> String {
        match &*self.node {
            Node::Rational(q) => q.to_string(),
            Node::Algebraic { poly, isolating, .. } => {
                let c: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
                format!("root([{}] in [{}, {}])", c.join(","), isolating.0, isolating.1)
            }
            Node::Decimal { text, .. } => text.clone(),
            Node::Expr { op, args } => {
                let inner: Vec<String> = args.iter().map(|a| a.describe()).collect();
                format!("{op:?}({})", inner.join(", "))
            }
        }
    }
}

impl fmt::Display for RigorousReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.enclosure.mid, self.enclosure.rad)
    }
}

fn combine(op: Op, args: &[RigorousReal], prec: u64) -> Result<Enclosure, RigorousError> {
    if args.iter().all(|a| a.enclosure.is_exact()) {
        let vals: Vec<&BigRational> = args.iter().map(|a| &a.enclosure.mid).collect();
        let q = match op {
            Op::Add => vals.iter().fold(BigRational::zero(), |acc, v| acc + *v),
            Op::Mul => vals.iter().fold(BigRational::one(), |acc, v| acc * *v),
            Op::Sub => vals[0] - vals[1],
            Op::Div => {
                if vals[1].is_zero() {
                    return Err(RigorousError::DivisionByZero);
                }
                vals[0] / vals[1]
            }
            Op::Neg => -vals[0].clone(),
            Op::Abs => vals[0].abs(),
            Op::Max => vals.iter().map(|v| (*v).clone()).max().expect("nonempty"),
        };
        return Ok(Enclosure::exact(q));
    }
    let balls: Vec<Ball> = args.iter().map(|a| a.enclosure.to_ball(prec)).collect();
    let out = match op {
        Op::Add => balls[1..].iter().fold(balls[0].clone(), |acc, b| acc.add(b, prec)),
        Op::Mul => balls[1..].iter().fold(balls[0].clone(), |acc, b| acc.mul(b, prec)),
        Op::Sub => balls[0].sub(&balls[1], prec),
        Op::Div => balls[0].div(&balls[1], prec).ok_or(RigorousError::DivisionByZero)?,
        Op::Neg => balls[0].neg(),
        Op::Abs => balls[0].abs(),
        Op::Max => balls[1..].iter().fold(balls[0].clone(), |acc, b| acc.max(b, prec)),
    };
    Ok(Enclosure::from_ball(&out))
}

/// Narrow an isolating bracket until its half-width meets the precision target.
fn refine_root(poly: &IntPoly, bracket: &(BigRational, BigRational), bits: u64) -> (BigRational, BigRational) {
    let (mut lo, mut hi) = bracket.clone();
    let sign_lo = poly.sign_at(&lo);
    let deriv = poly.derivative();
    let two = BigRational::from_integer(2.into());
    let newton_zone = pow2_rational(-24);
    loop {
        let enc = Enclosure { mid: (&lo + &hi) / &two, rad: (&hi - &lo) / &two };
        let target = radius_target(&enc, bits);
        if enc.rad <= target {
            return (lo, hi);
        }
        let width = &hi - &lo;
        if width < newton_zone {
            if let Some(next) = newton_bracket(poly, &deriv, &lo, &hi, sign_lo, &target) {
                (lo, hi) = next;
                continue;
            }
        }
        for _ in 0..4 {
            let m = dyadic_between(&lo, &hi);
            let s = poly.sign_at(&m);
            if s == 0 {
                return (m.clone(), m);
            }
            if s == sign_lo {
                lo = m;
            } else {
                hi = m;
            }
        }
    }
}

fn newton_bracket(
    poly: &IntPoly,
    deriv: &IntPoly,
    lo: &BigRational,
    hi: &BigRational,
    sign_lo: i32,
    target: &BigRational,
) -> Option<(BigRational, BigRational)> {
    let two = BigRational::from_integer(2.into());
    let x = dyadic_between(lo, hi);
    let d = deriv.eval(&x);
    if d.is_zero() {
        return None;
    }
    let width = hi - lo;
    let step = poly.eval(&x) / d;
    // quadratic convergence: the new error is about width^2, with a safety factor
    let mut err = &width * &width * BigRational::from_integer(256.into());
    let quarter = target / BigRational::from_integer(4.into());
    if err < quarter {
        err = quarter;
    }
    let prec_bits = {
        let e = err.denom().bits() as i64 - err.numer().bits() as i64;
        (e.max(0) as u64) + 8
    };
    let scale_bits = (x.numer().bits() as i64 - x.denom().bits() as i64).max(0) as u64;
    let x_new = Dyadic::from_rational(&(x - step), prec_bits + scale_bits + 2, Round::Nearest).to_rational();
    let a = (&x_new - &err).max(lo.clone());
    let b = (&x_new + &err).min(hi.clone());
    if a >= b || (&b - &a) * &two > width {
        return None;
    }
    let sa = if &a == lo { sign_lo } else { poly.sign_at(&a) };
    let sb = poly.sign_at(&b);
    if sa == 0 {
        return Some((a.clone(), a));
    }
    if sb == 0 {
        return Some((b.clone(), b));
    }
    if sa != sb && sa == sign_lo {
        Some((a, b))
    } else {
        None
    }
}

fn parse_decimal(text: &str) -> Result<(BigRational, BigRational), RigorousError> {
    let bad = || RigorousError::InvalidLiteral(text.to_string());
    let t = text.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = all.parse().map_err(|_| bad())?;
    if negative {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    let value = BigRational::from_integer(num) * pow(scale);
    let half_ulp = pow(scale) / BigRational::from_integer(2.into());
    Ok((value, half_ulp))
}

/// Certified three-valued comparison, doubling the precision from 64 bits up to `cap`.
pub fn compare(x: &RigorousReal, y: &RigorousReal, cap: u64) -> Comparison {
    let mut bits = START_BITS.min(cap.max(1));
    let mut xr = x.clone();
    let mut yr = y.clone();
    loop {
        if let (Ok(a), Ok(b)) = (xr.approximate(bits), yr.approximate(bits)) {
            xr = a;
            yr = b;
        }
        let (ex, ey) = (xr.enclosure(), yr.enclosure());
        if ex.upper() < ey.lower() {
            return Comparison::Less;
        }
        if ex.lower() > ey.upper() {
            return Comparison::Greater;
        }
        let stuck = ex.is_exact() && ey.is_exact();
        let floored = xr.has_literal_floor() && yr.has_literal_floor();
        if stuck || floored || bits >= cap {
            return Comparison::Indistinguishable;
        }
        bits = (bits * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sqrt2() -> RigorousReal {
        RigorousReal::algebraic_i64(&[-2, 0, 1], (1, 1), (2, 1)).unwrap()
    }

    #[test]
    fn sqrt2_midpoint_converges() {
        let r = sqrt2().refine(64).unwrap();
        let mid = r.to_f64();
        assert!((mid - std::f64::consts::SQRT_2).abs() < 1e-15);
        // radius <= 2^-64 * 2
        assert!(r.enclosure().rad <= q(2, 1) * pow2_rational(-64));
    }

    #[test]
    fn negative_sqrt2() {
        let r = RigorousReal::algebraic_i64(&[-2, 0, 1], (-2, 1), (0, 1)).unwrap().refine(80).unwrap();
        assert!((r.to_f64() + std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cube_root_of_two() {
        let r = RigorousReal::algebraic_i64(&[-2, 0, 0, 1], (1, 1), (2, 1)).unwrap().refine(64).unwrap();
        // bisection oracle in f64
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if m * m * m < 2.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((r.to_f64() - lo).abs() < 1e-8);
        assert!((r.to_f64() - 1.25992105).abs() < 1e-8);
    }

    #[test]
    fn isolation_errors() {
        assert_eq!(
            RigorousReal::algebraic_i64(&[-2, 0, 1], (2, 1), (3, 1)).unwrap_err(),
            RigorousError::NoSignChange { roots: 0 }
        );
        assert_eq!(
            RigorousReal::algebraic_i64(&[0, -1, 0, 1], (-2, 1), (2, 1)).unwrap_err(),
            RigorousError::NoSignChange { roots: 3 }
        );
        assert_eq!(
            RigorousReal::algebraic_i64(&[1, -2, 1], (0, 1), (2, 1)).unwrap_err(),
            RigorousError::NotSquareFree
        );
        assert_eq!(RigorousReal::algebraic_i64(&[0], (0, 1), (2, 1)).unwrap_err(), RigorousError::ZeroPolynomial);
    }

    #[test]
    fn rational_root_at_endpoint_is_exact() {
        let r = RigorousReal::algebraic_i64(&[-4, 0, 1], (1, 1), (2, 1)).unwrap();
        assert_eq!(r.is_exact_rational(), Some(&q(2, 1)));
    }

    #[test]
    fn exact_rational_has_zero_radius() {
        let r = RigorousReal::ratio(3, 7).refine(200).unwrap();
        assert!(r.enclosure().rad.is_zero());
        assert_eq!(r.enclosure().mid, q(3, 7));
    }

    #[test]
    fn sum_of_roots_refines() {
        let s3 = RigorousReal::algebraic_i64(&[-3, 0, 1], (1, 1), (2, 1)).unwrap();
        let s = sqrt2().add(&s3).refine(128).unwrap();
        assert!(s.enclosure().lower() > q(314626436, 100000000));
        assert!(s.enclosure().upper() < q(314626437, 100000000));
        let v = s.to_f64();
        assert!((v - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-14);
        assert!(meets(s.enclosure(), 128));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&sqrt2(), &RigorousReal::ratio(3, 2), 1 << 12), Comparison::Less);
        let a = sqrt2();
        assert_eq!(compare(&a, &a.clone(), 1 << 10), Comparison::Indistinguishable);
        let s3 = RigorousReal::algebraic_i64(&[-3, 0, 1], (1, 1), (2, 1)).unwrap();
        assert_eq!(compare(&sqrt2().add(&s3), &RigorousReal::ratio(22, 7), 1 << 12), Comparison::Greater);
    }

    #[test]
    fn decimal_literal_radius() {
        let d = RigorousReal::decimal("1.5").unwrap();
        assert_eq!(d.enclosure().mid, q(3, 2));
        assert_eq!(d.enclosure().rad, q(1, 20));
        let e = RigorousReal::decimal("-2.50e-3").unwrap();
        assert_eq!(e.enclosure().mid, q(-1, 400));
        assert_eq!(e.enclosure().rad, q(1, 200000));
        assert!(RigorousReal::decimal("1.2.3").is_err());
        assert!(RigorousReal::decimal("abc").is_err());
    }

    #[test]
    fn refine_beyond_cap_fails() {
        let err = sqrt2().refine_with_cap(100, 64).unwrap_err();
        assert_eq!(err, RigorousError::PrecisionCapExceeded { requested: 100, cap: 64 });
    }

    #[test]
    fn division_by_exact_zero() {
        let z = RigorousReal::integer(0);
        assert_eq!(RigorousReal::integer(1).div(&z).unwrap_err(), RigorousError::DivisionByZero);
    }

    #[test]
    fn sqrt_int_exact_and_irrational() {
        assert_eq!(RigorousReal::sqrt_int(&BigInt::from(49)).is_exact_rational(), Some(&q(7, 1)));
        let r = RigorousReal::sqrt_int(&BigInt::from(14)).refine(64).unwrap();
        assert!((r.to_f64() - 14f64.sqrt()).abs() < 1e-15);
    }
}
