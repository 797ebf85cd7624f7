//! Univariate polynomials with integer coefficients, stored lowest degree first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

type QPoly = Vec<BigRational>;

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of `p(x)` in {-1, 0, 1}, computed on integers after clearing the denominator.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let d = match self.degree() {
            Some(d) => d,
            None => return 0,
        };
        let num = x.numer();
        let den = x.denom();
        // den^d p(num/den) = sum c_i num^i den^(d-i); den > 0 so the sign is preserved
        let mut acc = BigInt::zero();
        let mut num_pow = BigInt::one();
        let mut den_pows = Vec::with_capacity(d + 1);
        let mut dp = BigInt::one();
        for _ in 0..=d {
            den_pows.push(dp.clone());
            dp *= den;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &num_pow * &den_pows[d - i];
            }
            num_pow *= num;
        }
        sign_of(&acc)
    }

    fn to_q(&self) -> QPoly {
        self.coeffs.iter().cloned().map(BigRational::from_integer).collect()
    }

    /// True when `gcd(p, p')` is constant.
    pub fn is_square_free(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => {
                let g = qpoly_gcd(self.to_q(), self.derivative().to_q());
                g.len() <= 1
            }
        }
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`, by Sturm's theorem.
    pub fn count_roots(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let seq = sturm_sequence(self);
        let v_lo = sign_variations(&seq, lo);
        let v_hi = sign_variations(&seq, hi);
        v_lo.saturating_sub(v_hi)
    }
}

fn sign_of(v: &BigInt) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qpoly_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1].clone() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &factor * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn qpoly_gcd(mut a: QPoly, mut b: QPoly) -> QPoly {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = qpoly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn sturm_sequence(p: &IntPoly) -> Vec<QPoly> {
    let mut seq: Vec<QPoly> = vec![p.to_q(), p.derivative().to_q()];
    trim(&mut seq[1]);
    while let Some(last) = seq.last() {
        if last.is_empty() {
            seq.pop();
            break;
        }
        let prev = &seq[seq.len() - 2];
        let r = qpoly_rem(prev, last);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn eval_q(p: &QPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn sign_variations(seq: &[QPoly], x: &BigRational) -> usize {
    let mut last = 0i32;
    let mut count = 0;
    for p in seq {
        let v = eval_q(p, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sturm_counts_roots() {
        // x^3 - x has roots -1, 0, 1
        let p = poly(&[0, -1, 0, 1]);
        assert_eq!(p.count_roots(&q(-2, 1), &q(2, 1)), 3);
        assert_eq!(p.count_roots(&q(1, 2), &q(2, 1)), 1);
        assert_eq!(p.count_roots(&q(2, 1), &q(3, 1)), 0);
        let sqrt2 = poly(&[-2, 0, 1]);
        assert_eq!(sqrt2.count_roots(&q(1, 1), &q(2, 1)), 1);
    }

    #[test]
    fn square_free_detection() {
        assert!(poly(&[-2, 0, 1]).is_square_free());
        // (x-1)^2
        assert!(!poly(&[1, -2, 1]).is_square_free());
    }

    #[test]
    fn sign_matches_rational_evaluation() {
        let p = poly(&[-2, 0, 0, 1]);
        for (n, d) in [(5, 4), (13, 10), (-3, 7), (126, 100)] {
            let x = q(n, d);
            let v = p.eval(&x);
            let expected = if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 };
            assert_eq!(p.sign_at(&x), expected);
        }
    }
}
