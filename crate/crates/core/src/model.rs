//! Target points, approximation sets and the linear forms `L(x) = max_k |xi_0 x_k - xi_k x_0|`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, IntVec};
use crate::rigorous::{compare, Ball, Comparison, Op, RigorousError, RigorousReal};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("config schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Rigorous(#[from] RigorousError),
    #[error("the first coordinate of the target cannot be certified nonzero")]
    ZeroLeadingCoordinate,
    #[error("L is undefined at the zero point")]
    ZeroPoint,
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Whether Q-linear independence of the coordinates was asserted by the user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Independence {
    Asserted,
    Unverified,
}

/// A point `xi = (xi_0, ..., xi_n)` with `xi_0 != 0`.
#[derive(Clone, Debug)]
pub struct TargetPoint {
    coords: Vec<RigorousReal>,
    pub independence: Independence,
}

impl TargetPoint {
    pub fn new(coords: Vec<RigorousReal>, independence: Independence) -> Result<Self, ModelError> {
        if coords.len() < 2 {
            return Err(ModelError::Schema("a target needs at least two coordinates".into()));
        }
        if compare(&coords[0], &RigorousReal::integer(0), 1 << 12) == Comparison::Indistinguishable {
            return Err(ModelError::ZeroLeadingCoordinate);
        }
        Ok(TargetPoint { coords, independence })
    }

    /// The dimension parameter `n` (there are `n + 1` coordinates).
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[RigorousReal] {
        &self.coords
    }

    /// Coordinate enclosures as dyadic balls refined to `bits`.
    pub fn balls(&self, bits: u64) -> Result<Vec<Ball>, ModelError> {
        self.coords
            .iter()
            .map(|c| Ok(c.approximate(bits)?.to_ball(bits + 8)))
            .collect()
    }

    /// The real number `sum_j c_j xi_j`.
    pub fn form_value(&self, form: &LinearForm) -> RigorousReal {
        let terms: Vec<RigorousReal> = form
            .coeffs
            .iter()
            .zip(&self.coords)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| x.scale_int(c.clone()))
            .collect();
        match terms.len() {
            0 => RigorousReal::integer(0),
            1 => terms.into_iter().next().expect("one term"),
            _ => RigorousReal::expr(Op::Add, terms).expect("nonempty sum"),
        }
    }

    /// Enclosure of `max_k |xi_0 x_k - xi_k x_0|` as an exact descriptor. When the maximizing
    /// branch can be certified within `cap` bits the returned value is that branch alone.
    pub fn l_value(&self, x: &IntegerPoint, cap: u64) -> Result<RigorousReal, ModelError> {
        self.check_dim(x)?;
        if x.is_zero() {
            return Err(ModelError::ZeroPoint);
        }
        let forms = LinearForm::branches(x);
        let values: Vec<RigorousReal> = forms.iter().map(|f| self.form_value(f).abs()).collect();
        if let Some(k) = certified_argmax(&values, &forms, cap) {
            return Ok(values[k].clone());
        }
        Ok(RigorousReal::max_of(values)?)
    }

    pub fn check_dim(&self, x: &IntegerPoint) -> Result<(), ModelError> {
        if x.dim() != self.coords.len() {
            return Err(ModelError::Dimension { expected: self.coords.len(), got: x.dim() });
        }
        Ok(())
    }
}

fn certified_argmax(values: &[RigorousReal], forms: &[LinearForm], cap: u64) -> Option<usize> {
    let mut best = 0;
    for k in 1..values.len() {
        if forms[k] == forms[best] {
            continue;
        }
        match compare(&values[k], &values[best], cap) {
            Comparison::Greater => best = k,
            Comparison::Less => {}
            Comparison::Indistinguishable => return None,
        }
    }
    Some(best)
}

/// A nonzero integer point, stored with canonical sign (first nonzero coordinate positive).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegerPoint {
    coords: Vec<BigInt>,
    norm_sq: BigInt,
}

impl IntegerPoint {
    pub fn new(mut coords: Vec<BigInt>) -> Self {
        if coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            for c in coords.iter_mut() {
                *c = -c.clone();
            }
        }
        let norm_sq = linalg::norm_sq(&coords);
        IntegerPoint { coords, norm_sq }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        IntegerPoint::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn norm_sq(&self) -> &BigInt {
        &self.norm_sq
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sq.is_zero()
    }

    pub fn negated_coords(&self) -> IntVec {
        self.coords.iter().map(|c| -c).collect()
    }

    pub fn scaled(&self, m: &BigInt) -> IntegerPoint {
        IntegerPoint::new(self.coords.iter().map(|c| c * m).collect())
    }

    /// The norm `||x||` as an exact descriptor.
    pub fn norm(&self) -> RigorousReal {
        RigorousReal::sqrt_int(&self.norm_sq)
    }
}

impl fmt::Display for IntegerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Integer coefficients `c` of the linear form `sum_j c_j xi_j`, up to sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    pub coeffs: IntVec,
}

impl LinearForm {
    pub fn new(coeffs: IntVec) -> Self {
        let mut coeffs = coeffs;
        if coeffs.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            for c in coeffs.iter_mut() {
                *c = -c.clone();
            }
        }
        LinearForm { coeffs }
    }

    /// The forms `xi_0 x_k - xi_k x_0` for `k = 1..=n`.
    pub fn branches(x: &IntegerPoint) -> Vec<LinearForm> {
        let c = x.coords();
        (1..c.len())
            .map(|k| {
                let mut v = vec![BigInt::zero(); c.len()];
                v[0] = c[k].clone();
                v[k] = -c[0].clone();
                LinearForm::new(v)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Ball enclosure of `|sum_j c_j xi_j|` from coordinate balls.
    pub fn abs_ball(&self, xi: &[Ball], prec: u64) -> Ball {
        let mut acc = Ball::from_int(0);
        for (c, b) in self.coeffs.iter().zip(xi) {
            if !c.is_zero() {
                acc = acc.add(&b.mul_int(c, prec), prec);
            }
        }
        acc.abs()
    }
}

/// The set `S` of integer points allowed to compete.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ApproxSet {
    Full,
    Congruence {
        modulus: BigInt,
        /// Allowed residues per coordinate index; coordinates not listed are unrestricted.
        residues: BTreeMap<usize, Vec<BigInt>>,
    },
    Sublattice {
        basis: Vec<IntVec>,
    },
}

impl ApproxSet {
    pub fn validate(&self, dim: usize) -> Result<(), ModelError> {
        match self {
            ApproxSet::Full => Ok(()),
            ApproxSet::Congruence { modulus, residues } => {
                if !modulus.is_positive() {
                    return Err(ModelError::Schema("congruence modulus must be positive".into()));
                }
                for (k, r) in residues {
                    if *k >= dim {
                        return Err(ModelError::Schema(format!("residue index {k} out of range")));
                    }
                    if r.is_empty() {
                        return Err(ModelError::Schema(format!("empty residue list for coordinate {k}")));
                    }
                }
                Ok(())
            }
            ApproxSet::Sublattice { basis } => {
                if basis.is_empty() || basis.iter().any(|v| v.len() != dim) {
                    return Err(ModelError::Schema("sublattice basis vectors must match the dimension".into()));
                }
                if linalg::rank(basis) != basis.len() {
                    return Err(ModelError::Schema("sublattice basis is not of full rank".into()));
                }
                Ok(())
            }
        }
    }

    /// Exact membership of the coordinate vector `x`.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        match self {
            ApproxSet::Full => true,
            ApproxSet::Congruence { modulus, residues } => residues.iter().all(|(k, allowed)| {
                let r = x[*k].mod_floor(modulus);
                allowed.iter().any(|a| a.mod_floor(modulus) == r)
            }),
            ApproxSet::Sublattice { basis } => linalg::in_lattice(&linalg::hnf(basis), x),
        }
    }

    /// Prepared membership test (the sublattice Hermite form is computed once).
    pub fn matcher(&self) -> SetMatcher<'_> {
        let hnf = match self {
            ApproxSet::Sublattice { basis } => Some(linalg::hnf(basis)),
            _ => None,
        };
        SetMatcher { set: self, hnf }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, ApproxSet::Full)
    }
}

pub struct SetMatcher<'a> {
    set: &'a ApproxSet,
    hnf: Option<Vec<IntVec>>,
}

impl SetMatcher<'_> {
    pub fn contains(&self, x: &[BigInt]) -> bool {
        match (&self.hnf, self.set) {
            (Some(h), _) => linalg::in_lattice(h, x),
            (None, s) => s.contains(x),
        }
    }

    /// Membership of `x` or `-x`: minimal points are taken up to sign.
    pub fn contains_up_to_sign(&self, x: &IntegerPoint) -> bool {
        self.contains(x.coords()) || self.contains(&x.negated_coords())
    }
}

/// Exact membership test.
pub fn member(set: &ApproxSet, x: &IntegerPoint) -> bool {
    set.contains(x.coords())
}

/// `L(x)` evaluated with the given precision cap.
#[allow(non_snake_case)]
pub fn L_value(xi: &TargetPoint, x: &IntegerPoint, cap: u64) -> Result<RigorousReal, ModelError> {
    xi.l_value(x, cap)
}

// ----------------------------------------------------------------------------------------
// configuration documents

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Int(i64),
    Text(String),
}

impl NumberText {
    fn to_bigint(&self) -> Result<BigInt, ModelError> {
        match self {
            NumberText::Int(v) => Ok(BigInt::from(*v)),
            NumberText::Text(s) => s.trim().parse().map_err(|_| ModelError::Schema(format!("bad integer {s:?}"))),
        }
    }

    fn to_rational(&self) -> Result<BigRational, ModelError> {
        match self {
            NumberText::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            NumberText::Text(s) => parse_rational(s),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ModelError> {
    let bad = || ModelError::Schema(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            if s.contains(['.', 'e', 'E']) {
                let d = RigorousReal::decimal(s).map_err(|_| bad())?;
                Ok(d.enclosure().mid.clone())
            } else {
                Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CoordSpec {
    Rational { value: NumberText },
    Algebraic { minpoly: Vec<NumberText>, interval: [NumberText; 2] },
    Decimal { value: String },
    Expr { op: String, args: Vec<CoordSpec> },
}

impl CoordSpec {
    pub fn build(&self) -> Result<RigorousReal, ModelError> {
        match self {
            CoordSpec::Rational { value } => Ok(RigorousReal::rational(value.to_rational()?)),
            CoordSpec::Algebraic { minpoly, interval } => {
                let coeffs = minpoly.iter().map(|c| c.to_bigint()).collect::<Result<Vec<_>, _>>()?;
                Ok(RigorousReal::algebraic(&coeffs, interval[0].to_rational()?, interval[1].to_rational()?)?)
            }
            CoordSpec::Decimal { value } => Ok(RigorousReal::decimal(value)?),
            CoordSpec::Expr { op, args } => {
                let op = match op.as_str() {
                    "+" => Op::Add,
                    "-" => Op::Sub,
                    "*" => Op::Mul,
                    "/" => Op::Div,
                    other => return Err(ModelError::Schema(format!("unknown operator {other:?}"))),
                };
                let args = args.iter().map(|a| a.build()).collect::<Result<Vec<_>, _>>()?;
                Ok(RigorousReal::expr(op, args)?)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SetSpec {
    Full,
    Congruence { modulus: NumberText, residues: BTreeMap<String, Vec<NumberText>> },
    Sublattice { basis: Vec<Vec<NumberText>> },
}

impl SetSpec {
    pub fn build(&self) -> Result<ApproxSet, ModelError> {
        match self {
            SetSpec::Full => Ok(ApproxSet::Full),
            SetSpec::Congruence { modulus, residues } => {
                let mut map = BTreeMap::new();
                for (k, v) in residues {
                    let idx: usize = k.parse().map_err(|_| ModelError::Schema(format!("bad coordinate index {k:?}")))?;
                    let vals = v.iter().map(|r| r.to_bigint()).collect::<Result<Vec<_>, _>>()?;
                    map.insert(idx, vals);
                }
                Ok(ApproxSet::Congruence { modulus: modulus.to_bigint()?, residues: map })
            }
            SetSpec::Sublattice { basis } => {
                let rows = basis
                    .iter()
                    .map(|row| row.iter().map(|v| v.to_bigint()).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ApproxSet::Sublattice { basis: rows })
            }
        }
    }
}

/// The experiment configuration document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetConfig {
    pub n: usize,
    pub coords: Vec<CoordSpec>,
    #[serde(rename = "S", default = "default_set")]
    pub set: SetSpec,
    #[serde(default)]
    pub independence: Option<Independence>,
}

fn default_set() -> SetSpec {
    SetSpec::Full
}

impl TargetConfig {
    pub fn build(&self) -> Result<(TargetPoint, ApproxSet), ModelError> {
        if self.coords.len() != self.n + 1 {
            return Err(ModelError::Dimension { expected: self.n + 1, got: self.coords.len() });
        }
        if self.n < 1 {
            return Err(ModelError::Schema("n must be at least 1".into()));
        }
        let coords = self.coords.iter().map(|c| c.build()).collect::<Result<Vec<_>, _>>()?;
        let target = TargetPoint::new(coords, self.independence.unwrap_or(Independence::Asserted))?;
        let set = self.set.build()?;
        set.validate(self.n + 1)?;
        Ok((target, set))
    }
}

/// Parse a JSON configuration document.
pub fn load_target(document: &str) -> Result<(TargetPoint, ApproxSet), ModelError> {
    let cfg: TargetConfig = serde_json::from_str(document).map_err(|e| ModelError::Schema(e.to_string()))?;
    cfg.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_target(k: i64) -> RigorousReal {
        RigorousReal::algebraic_i64(&[-k, 0, 1], (1, 1), (2, 1)).unwrap()
    }

    #[test]
    fn loads_quadratic_target() {
        let doc = r#"{"n":1,"coords":[{"type":"rational","value":"1"},
            {"type":"algebraic","minpoly":[-2,0,1],"interval":["1","2"]}]}"#;
        let (xi, s) = load_target(doc).unwrap();
        assert_eq!(xi.n(), 1);
        assert!(s.is_full());
        assert!((xi.coords()[1].refine(64).unwrap().to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn loads_cubic_target() {
        let doc = r#"{"n":2,"coords":[{"type":"rational","value":1},
            {"type":"algebraic","minpoly":[-2,0,0,1],"interval":["1","2"]},
            {"type":"algebraic","minpoly":[-4,0,0,1],"interval":["1","2"]}]}"#;
        let (xi, _) = load_target(doc).unwrap();
        assert_eq!(xi.n(), 2);
    }

    #[test]
    fn loads_congruence_set() {
        let doc = r#"{"n":1,"coords":[{"type":"rational","value":"1"},{"type":"decimal","value":"1.41421356237"}],
            "S":{"type":"congruence","modulus":2,"residues":{"0":[1]}}}"#;
        let (_, s) = load_target(doc).unwrap();
        assert!(!member(&s, &IntegerPoint::from_i64(&[2, 3])));
        assert!(member(&s, &IntegerPoint::from_i64(&[3, 4])));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(load_target("{}"), Err(ModelError::Schema(_))));
        let wrong_n = r#"{"n":2,"coords":[{"type":"rational","value":"1"}]}"#;
        assert!(matches!(load_target(wrong_n), Err(ModelError::Dimension { .. })));
        let bad_root = r#"{"n":1,"coords":[{"type":"rational","value":"1"},
            {"type":"algebraic","minpoly":[-2,0,1],"interval":["2","3"]}]}"#;
        assert!(matches!(load_target(bad_root), Err(ModelError::Rigorous(RigorousError::NoSignChange { .. }))));
        let zero_lead = r#"{"n":1,"coords":[{"type":"rational","value":"0"},{"type":"rational","value":"1"}]}"#;
        assert!(matches!(load_target(zero_lead), Err(ModelError::ZeroLeadingCoordinate)));
    }

    #[test]
    fn membership_examples() {
        assert!(member(&ApproxSet::Full, &IntegerPoint::from_i64(&[7, -3])));
        let sub = ApproxSet::Sublattice { basis: linalg::to_big(&[vec![2, 0], vec![0, 1]]) };
        assert!(member(&sub, &IntegerPoint::from_i64(&[4, 5])));
        assert!(!member(&sub, &IntegerPoint::from_i64(&[3, 5])));
    }

    #[test]
    fn l_value_examples() {
        let xi = TargetPoint::new(vec![RigorousReal::integer(1), sqrt_target(2)], Independence::Asserted).unwrap();
        let v = xi.l_value(&IntegerPoint::from_i64(&[1, 1]), 1 << 12).unwrap().refine(64).unwrap();
        assert!((v.to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let v = xi.l_value(&IntegerPoint::from_i64(&[0, 1]), 1 << 12).unwrap();
        assert_eq!(v.enclosure().mid, BigRational::from_integer(1.into()));
        assert!(v.enclosure().is_exact());

        let xi3 = TargetPoint::new(
            vec![RigorousReal::integer(1), sqrt_target(2), sqrt_target(3)],
            Independence::Asserted,
        )
        .unwrap();
        let v = xi3.l_value(&IntegerPoint::from_i64(&[1, 1, 2]), 1 << 12).unwrap().refine(64).unwrap();
        assert!((v.to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(xi.l_value(&IntegerPoint::from_i64(&[0, 0]), 64).unwrap_err(), ModelError::ZeroPoint);
    }

    #[test]
    fn canonical_sign() {
        let p = IntegerPoint::from_i64(&[0, -2, 3]);
        assert_eq!(p.coords(), &[BigInt::from(0), BigInt::from(2), BigInt::from(-3)]);
        assert_eq!(p.norm_sq(), &BigInt::from(13));
    }
}
