//! Binary floating-point numbers with arbitrary-precision mantissa.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction used when a dyadic is truncated to fewer bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// The number `man * 2^exp`. Normalized so that `man` is odd, or zero with `exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    /// `2^e`
    pub fn pow2(e: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: e }
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.man.trailing_zeros() {
            if tz > 0 {
                self.man >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn neg(&self) -> Self {
        Dyadic { man: -&self.man, exp: self.exp }
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Position of the most significant bit: `|self| ∈ [2^(m-1), 2^m)` for `m = magnitude()`.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 4
        } else {
            self.exp + self.man.bits() as i64
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { man: &self.man * &other.man, exp: self.exp + other.exp }
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.man * k, self.exp)
    }

    pub fn mul_pow2(&self, e: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + e }
    }

    /// Truncate the mantissa to at most `prec` bits using the given direction.
    pub fn round(&self, prec: u64, dir: Round) -> Dyadic {
        let bits = self.man.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let divisor = BigInt::one() << shift as usize;
        let (q, r) = self.man.div_mod_floor(&divisor);
        let q = match dir {
            Round::Down => q,
            Round::Up => {
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
            Round::Nearest => {
                let twice: BigInt = &r << 1usize;
                if twice >= divisor {
                    q + 1
                } else {
                    q
                }
            }
        };
        Dyadic::new(q, self.exp + shift as i64)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Dyadic approximation of `q` with `prec` significant bits, rounded in the given direction.
    pub fn from_rational(q: &BigRational, prec: u64, dir: Round) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = q.numer();
        let den = q.denom();
        if den.is_one() {
            return Dyadic::from_int(num.clone()).round(prec, dir);
        }
        if let Some(tz) = den.trailing_zeros() {
            if (BigInt::one() << tz as usize) == *den {
                return Dyadic::new(num.clone(), -(tz as i64)).round(prec, dir);
            }
        }
        // scale so the integer quotient carries prec + 2 bits
        let shift = prec as i64 + 2 - (num.bits() as i64 - den.bits() as i64);
        let scaled_num = if shift >= 0 { num << shift as usize } else { num.clone() };
        let scaled_den = if shift >= 0 { den.clone() } else { den << (-shift) as usize };
        let (qt, r) = scaled_num.div_mod_floor(&scaled_den);
        let man = match dir {
            Round::Down => qt,
            Round::Up => {
                if r.is_zero() {
                    qt
                } else {
                    qt + 1
                }
            }
            Round::Nearest => {
                let twice: BigInt = &r << 1usize;
                if twice >= scaled_den {
                    qt + 1
                } else {
                    qt
                }
            }
        };
        Dyadic::new(man, -shift).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            self.man.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Nearest f64, with no rounding guarantee beyond what the conversion gives.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let d = self.round(60, Round::Nearest);
        let m = d.man.to_f64().unwrap_or(f64::NAN);
        if d.exp > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if d.exp < -2200 {
            return 0.0;
        }
        let e = d.exp as i32;
        // split the scaling to stay clear of intermediate overflow
        m * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }

    /// An f64 that is `<= self` (Down) or `>= self` (Up).
    pub fn to_f64_directed(&self, dir: Round) -> f64 {
        let v = self.to_f64();
        if !v.is_finite() {
            return v;
        }
        match dir {
            Round::Down => next_down(v),
            Round::Up => next_up(v),
            Round::Nearest => v,
        }
    }
}

pub(crate) fn next_up(v: f64) -> f64 {
    if v.is_nan() || v == f64::INFINITY {
        return v;
    }
    if v == 0.0 {
        return f64::from_bits(1);
    }
    let bits = v.to_bits();
    if v > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

pub(crate) fn next_down(v: f64) -> f64 {
    -next_up(-v)
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.man, self.exp)
    }
}
