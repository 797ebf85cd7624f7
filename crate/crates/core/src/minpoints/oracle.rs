//! Slow reference implementations used to cross-check the enumerator.
//!
//! Everything here evaluates `L` through [`RigorousReal`] expression trees and the generic
//! [`compare`] routine, sharing no code with the ball evaluator used by the fast path. Windows
//! are located in `f64` with a margin of whole units, so they only decide where to look.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::model::{ApproxSet, Independence, IntegerPoint, LinearForm, TargetPoint};
use crate::rigorous::{compare, Comparison, RigorousReal};

use super::{MinimalPointSequence, MinpointsError};

/// Slack added to `f64` estimates of `L` before discarding a point.
const F64_SLACK: f64 = 1e-6;

struct Scored {
    point: IntegerPoint,
    form: Option<LinearForm>,
    value: RigorousReal,
    approx: f64,
}

struct Oracle {
    xi: TargetPoint,
    xi_f64: Vec<f64>,
    cap: u64,
}

impl Oracle {
    fn new(xi: &TargetPoint, cap: u64) -> Result<Self, MinpointsError> {
        let coords = xi
            .coords()
            .iter()
            .map(|c| c.refine_with_cap(200, cap))
            .collect::<Result<Vec<_>, _>>()?;
        let xi_f64 = coords.iter().map(|c| c.to_f64()).collect();
        let xi = TargetPoint::new(coords, Independence::Unverified)?;
        Ok(Oracle { xi, xi_f64, cap })
    }

    fn approx_l(&self, x: &[BigInt]) -> f64 {
        let x0 = x[0].to_f64().unwrap_or(f64::NAN);
        (1..x.len())
            .map(|k| (self.xi_f64[0] * x[k].to_f64().unwrap_or(f64::NAN) - self.xi_f64[k] * x0).abs())
            .fold(0.0, f64::max)
    }

    fn score(&self, point: IntegerPoint) -> Result<Scored, MinpointsError> {
        let forms = LinearForm::branches(&point);
        let values: Vec<RigorousReal> = forms.iter().map(|f| self.xi.form_value(f).abs()).collect();
        let mut best = 0;
        let mut certified = true;
        for k in 1..forms.len() {
            if forms[k] == forms[best] {
                continue;
            }
            match compare(&values[k], &values[best], self.cap) {
                Comparison::Greater => best = k,
                Comparison::Less => {}
                Comparison::Indistinguishable => certified = false,
            }
        }
        let approx = self.approx_l(point.coords());
        Ok(if certified {
            Scored { point, form: Some(forms[best].clone()), value: values[best].clone(), approx }
        } else {
            Scored { point, form: None, value: RigorousReal::max_of(values)?, approx }
        })
    }

    fn cmp(&self, a: &Scored, b: &Scored) -> Result<Ordering, MinpointsError> {
        if let (Some(fa), Some(fb)) = (&a.form, &b.form) {
            if fa == fb {
                return Ok(Ordering::Equal);
            }
        }
        match compare(&a.value, &b.value, self.cap) {
            Comparison::Less => Ok(Ordering::Less),
            Comparison::Greater => Ok(Ordering::Greater),
            Comparison::Indistinguishable => {
                if let (Some(p), Some(q)) = (a.value.is_exact_rational(), b.value.is_exact_rational()) {
                    if p == q {
                        return Ok(Ordering::Equal);
                    }
                }
                for s in [a, b] {
                    if s.value.refine_with_cap(64, self.cap).map(|v| v.enclosure().contains_zero()).unwrap_or(true) {
                        return Err(MinpointsError::DependentCoordinates { witness: s.point.to_string() });
                    }
                }
                if self.xi.coords().iter().any(|c| c.has_literal_floor()) {
                    return Err(MinpointsError::DependentCoordinates { witness: format!("{} ~ {}", a.point, b.point) });
                }
                Err(MinpointsError::TieUnresolved {
                    first: a.point.to_string(),
                    second: b.point.to_string(),
                    cap: self.cap,
                })
            }
        }
    }

    /// Canonical points `x` with `x_0 = a`, squared norm at most `max_sq`, and each
    /// `|xi_0 x_k - xi_k a| <= width` up to the `f64` margin.
    fn slab_row(&self, a: &BigInt, width: f64, max_sq: &BigInt) -> Vec<IntegerPoint> {
        let af = a.to_f64().unwrap_or(f64::NAN);
        let dim = self.xi_f64.len();
        let h = width / self.xi_f64[0].abs();
        let ranges: Vec<(i64, i64)> = (1..dim)
            .map(|k| {
                let t = self.xi_f64[k] / self.xi_f64[0] * af;
                ((t - h).floor() as i64 - 1, (t + h).ceil() as i64 + 1)
            })
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let mut coords = vec![a.clone()];
            coords.extend(cur.iter().map(|&v| BigInt::from(v)));
            let canonical = !a.is_zero() || cur.iter().find(|v| **v != 0).is_some_and(|v| *v > 0);
            if canonical {
                let nsq: BigInt = coords.iter().map(|c| c * c).sum();
                if &nsq <= max_sq {
                    out.push(IntegerPoint::new(coords));
                }
            }
            let mut k = cur.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < ranges[k].1 {
                    cur[k] += 1;
                    break;
                }
                cur[k] = ranges[k].0;
            }
        }
    }

    fn sweep(&self, mut pts: Vec<Scored>) -> Result<Vec<IntegerPoint>, MinpointsError> {
        pts.sort_by(|a, b| a.point.norm_sq().cmp(b.point.norm_sq()).then_with(|| a.point.cmp(&b.point)));
        let mut records: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < pts.len() {
            let mut j = i;
            let mut best = i;
            while j < pts.len() && pts[j].point.norm_sq() == pts[i].point.norm_sq() {
                if self.cmp(&pts[j], &pts[best])? == Ordering::Less {
                    best = j;
                }
                j += 1;
            }
            let better = match records.last() {
                None => true,
                Some(&r) => self.cmp(&pts[best], &pts[r])? == Ordering::Less,
            };
            if better {
                records.push(best);
            }
            i = j;
        }
        Ok(records.into_iter().map(|k| pts[k].point.clone()).collect())
    }
}

/// Canonical nonzero points in the box `[-r, r]^dim` with squared norm at most `r_sq`.
fn box_points(dim: usize, r_sq: &BigInt) -> Vec<IntegerPoint> {
    let r = r_sq.sqrt().to_i64().unwrap_or(i64::MAX);
    let mut out = Vec::new();
    let mut cur = vec![-r; dim];
    loop {
        let nonzero = cur.iter().find(|v| **v != 0);
        if nonzero.is_some_and(|v| *v > 0) {
            let coords: Vec<BigInt> = cur.iter().map(|&v| BigInt::from(v)).collect();
            let nsq: BigInt = coords.iter().map(|c| c * c).sum();
            if &nsq <= r_sq {
                out.push(IntegerPoint::new(coords));
            }
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < r {
                cur[k] += 1;
                break;
            }
            cur[k] = -r;
        }
    }
}

fn in_set(set: &ApproxSet, p: &IntegerPoint) -> bool {
    set.contains(p.coords()) || set.contains(&p.negated_coords())
}

/// The first minimal point: smallest norm in `S`, smallest `L` among those, then lexicographic.
fn first_point(o: &Oracle, set: &ApproxSet, xmax_sq: &BigInt) -> Result<Scored, MinpointsError> {
    let dim = o.xi_f64.len();
    let mut r_sq = BigInt::from(1);
    loop {
        let r = r_sq.clone().min(xmax_sq.clone());
        let members: Vec<IntegerPoint> = box_points(dim, &r).into_iter().filter(|p| in_set(set, p)).collect();
        if let Some(min_sq) = members.iter().map(|p| p.norm_sq().clone()).min() {
            let mut shell: Vec<IntegerPoint> = members.into_iter().filter(|p| p.norm_sq() == &min_sq).collect();
            shell.sort();
            let mut best = o.score(shell[0].clone())?;
            for p in shell.into_iter().skip(1) {
                let s = o.score(p)?;
                if o.cmp(&s, &best)? == Ordering::Less {
                    best = s;
                }
            }
            return Ok(best);
        }
        if r == *xmax_sq {
            return Err(MinpointsError::EmptySet { x_max: xmax_sq.to_string() });
        }
        r_sq *= 4;
    }
}

/// Minimal points of norm at most `x_max` by exhaustive search of the region
/// `L(x) <= L(x_first)`, which contains every later minimal point.
pub fn exhaustive_minimal_points(
    xi: &TargetPoint,
    set: &ApproxSet,
    x_max: &BigRational,
    cap: u64,
) -> Result<Vec<IntegerPoint>, MinpointsError> {
    let o = Oracle::new(xi, cap)?;
    let xmax_sq = (x_max * x_max).floor().to_integer();
    let first = first_point(&o, set, &xmax_sq)?;
    let width = first.approx + F64_SLACK;
    let mut pts = Vec::new();
    let mut a = BigInt::zero();
    let top = xmax_sq.sqrt();
    while a <= top {
        for p in o.slab_row(&a, width, &xmax_sq) {
            if !in_set(set, &p) || o.approx_l(p.coords()) > width {
                continue;
            }
            let s = o.score(p)?;
            if o.cmp(&s, &first)? != Ordering::Greater {
                pts.push(s);
            }
        }
        a += 1;
    }
    o.sweep(pts)
}

/// Minimal points by scoring every canonical point of norm at most `x_max`. Only feasible
/// for small bounds.
pub fn full_ball_minimal_points(
    xi: &TargetPoint,
    set: &ApproxSet,
    x_max: &BigRational,
    cap: u64,
) -> Result<Vec<IntegerPoint>, MinpointsError> {
    let o = Oracle::new(xi, cap)?;
    let xmax_sq = (x_max * x_max).floor().to_integer();
    let pts = box_points(o.xi_f64.len(), &xmax_sq)
        .into_iter()
        .filter(|p| in_set(set, p))
        .map(|p| o.score(p))
        .collect::<Result<Vec<_>, _>>()?;
    if pts.is_empty() {
        return Err(MinpointsError::EmptySet { x_max: x_max.to_string() });
    }
    o.sweep(pts)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct PropertyReport {
    pub norms_increase: bool,
    pub values_decrease: bool,
    pub no_better_point: bool,
    pub points_checked: usize,
    pub violations: Vec<String>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.norms_increase && self.values_decrease && self.no_better_point
    }
}

/// Re-checks properties (a), (b), (c) of a sequence up to its exhausted range.
pub fn verify_properties(seq: &MinimalPointSequence) -> Result<PropertyReport, MinpointsError> {
    let o = Oracle::new(&seq.target, seq.cap)?;
    let mut report = PropertyReport { norms_increase: true, values_decrease: true, no_better_point: true, ..Default::default() };
    if seq.entries.is_empty() {
        return Ok(report);
    }
    let scored = seq
        .entries
        .iter()
        .map(|e| o.score(e.point.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 1..scored.len() {
        if scored[i].point.norm_sq() <= scored[i - 1].point.norm_sq() {
            report.norms_increase = false;
            report.violations.push(format!("(a) fails at {i}"));
        }
        if o.cmp(&scored[i], &scored[i - 1])? != Ordering::Less {
            report.values_decrease = false;
            report.violations.push(format!("(b) fails at {i}"));
        }
    }

    let xmax_sq = (&seq.exhausted_up_to * &seq.exhausted_up_to).floor().to_integer();
    let width = scored[0].approx + F64_SLACK;
    let norms: Vec<BigInt> = scored.iter().map(|s| s.point.norm_sq().clone()).collect();
    let top = xmax_sq.sqrt();
    let mut a = BigInt::zero();
    while a <= top {
        for p in o.slab_row(&a, width, &xmax_sq) {
            if !in_set(&seq.set, &p) {
                continue;
            }
            report.points_checked += 1;
            let m = norms.partition_point(|v| v <= p.norm_sq());
            if m == 0 {
                report.no_better_point = false;
                report.violations.push(format!("{p} in S has norm below the first entry"));
                continue;
            }
            let rec = &scored[m - 1];
            if rec.point == p || o.approx_l(p.coords()) > rec.approx + F64_SLACK {
                continue;
            }
            let s = o.score(p)?;
            if o.cmp(&s, rec)? == Ordering::Less {
                report.no_better_point = false;
                report.violations.push(format!("(c) fails: {} beats entry {}", s.point, m - 1));
            }
        }
        a += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minpoints::enumerate_minimal_points;
    use crate::model::load_target;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    const SQRT2: &str = r#"{"n":1,"coords":[{"type":"rational","value":1},{"type":"algebraic","minpoly":[-2,0,1],"interval":[1,2]}]}"#;

    #[test]
    fn full_ball_agrees_with_slab_search() {
        let (xi, set) = load_target(SQRT2).unwrap();
        let a = full_ball_minimal_points(&xi, &set, &int(30), 4096).unwrap();
        let b = exhaustive_minimal_points(&xi, &set, &int(30), 4096).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn properties_hold_for_enumeration() {
        let (xi, set) = load_target(SQRT2).unwrap();
        let seq = enumerate_minimal_points(&xi, &set, &int(500), 4096).unwrap();
        let r = verify_properties(&seq).unwrap();
        assert!(r.all_pass(), "{:?}", r.violations);
        assert!(r.points_checked > 500);
    }

    #[test]
    fn a_missing_point_is_caught() {
        let (xi, set) = load_target(SQRT2).unwrap();
        let mut seq = enumerate_minimal_points(&xi, &set, &int(100), 4096).unwrap();
        seq.entries.remove(3);
        let r = verify_properties(&seq).unwrap();
        assert!(!r.no_better_point);
    }
}
