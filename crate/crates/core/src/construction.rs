//! The subspace families built from a tail of minimal points.
//!
//! Write `V[i, j]` for the span of `x_i, ..., x_j`. Starting at `i0`, `i_t` is the last index
//! with `dim V[i0, i_t] = t + 1`. For `1 <= k <= t + 1`, `s(t, k)` is the largest `s <= i_t`
//! with `dim V[s, i_t + 1] = k + 1`, and
//!
//! ```text
//! U_t^k     = V[s(t,k), i_t]
//! V_t^{k+1} = V[s(t,k), i_t + 1]
//! ```
//!
//! Everything is decided with exact integer ranks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{EchelonBasis, IntVec};
use crate::minpoints::{format_sig, MinimalPointSequence};
use crate::model::IntegerPoint;
use crate::rigorous::{Ball, Dyadic};
use crate::subspaces::{self, RationalSubspace};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("the construction needs n >= 2, got n = {0}")]
    DimensionTooSmall(usize),
    #[error("level k = {k} outside 1..={max}")]
    LevelOutOfRange { k: usize, max: usize },
    #[error("points have dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

fn span(points: &[IntegerPoint]) -> RationalSubspace {
    let d = points.first().map(|p| p.dim()).unwrap_or(0);
    let rows: Vec<IntVec> = points.iter().map(|p| p.coords().to_vec()).collect();
    subspaces::saturate(d, &rows)
}

/// `[i_0, ..., i_{n-1}]` for the tail starting at `i0`.
pub fn select_indices(points: &[IntegerPoint], i0: usize, n: usize) -> Result<Vec<usize>, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::DimensionTooSmall(n));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != n + 1) {
        return Err(ConstructionError::Dimension { expected: n + 1, got: p.dim() });
    }
    if i0 >= points.len() {
        return Err(ConstructionError::InsufficientData(format!("no entry at index {i0}")));
    }
    // ranks[j - i0] = dim V[i0, j]
    let mut basis = EchelonBasis::new();
    let mut last_at_rank = vec![None; n + 2];
    for (j, p) in points.iter().enumerate().skip(i0) {
        basis.insert(p.coords());
        last_at_rank[basis.rank()] = Some(j);
        if basis.rank() == n + 1 {
            break;
        }
    }
    (0..n)
        .map(|t| {
            // i_t is certified as largest only once the rank has gone past t + 1
            match (last_at_rank[t + 1], last_at_rank[t + 2]) {
                (Some(i), Some(_)) => Ok(i),
                _ => Err(ConstructionError::InsufficientData(format!(
                    "the tail from {i0} does not leave a {}-dimensional span within {} entries",
                    t + 1,
                    points.len()
                ))),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceFamily {
    pub n: usize,
    pub i0: usize,
    pub indices: Vec<usize>,
    /// `s_table[t][k - 1] = s(t, k)` for `1 <= k <= t + 1`.
    pub s_table: Vec<Vec<usize>>,
    /// `u[t][k - 1] = U_t^k`
    pub u: Vec<Vec<RationalSubspace>>,
    /// `v[t][k - 1] = V_t^{k+1}`
    pub v: Vec<Vec<RationalSubspace>>,
    /// `V[i0, i_t]`
    pub head_spans: Vec<RationalSubspace>,
    /// `V[i0, i_t + 1]`
    pub head_spans_next: Vec<RationalSubspace>,
}

impl SubspaceFamily {
    pub fn s(&self, t: usize, k: usize) -> usize {
        self.s_table[t][k - 1]
    }

    pub fn u(&self, t: usize, k: usize) -> &RationalSubspace {
        &self.u[t][k - 1]
    }

    /// `V_t^{k+1}`; the argument is the superscript `k + 1`.
    pub fn v(&self, t: usize, k_plus_one: usize) -> &RationalSubspace {
        &self.v[t][k_plus_one - 2]
    }
}

pub fn build_subspace_family(points: &[IntegerPoint], indices: &[usize]) -> Result<SubspaceFamily, ConstructionError> {
    let n = indices.len();
    if n < 2 {
        return Err(ConstructionError::DimensionTooSmall(n));
    }
    let i0 = indices[0];
    let top = indices[n - 1] + 1;
    if top >= points.len() {
        return Err(ConstructionError::InsufficientData(format!("entry {top} is missing")));
    }
    let mut s_table = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for (t, &it) in indices.iter().enumerate() {
        // backward scan: rank of V[s, i_t + 1] for s = i_t, i_t - 1, ..., i0
        let mut basis = EchelonBasis::new();
        basis.insert(points[it + 1].coords());
        let mut last_s = vec![None; t + 3];
        for s in (i0..=it).rev() {
            basis.insert(points[s].coords());
            let r = basis.rank();
            if r < last_s.len() {
                // the largest s reaching rank r is the first one met going backwards
                last_s[r].get_or_insert(s);
            }
        }
        let row: Vec<usize> = (1..=t + 1)
            .map(|k| {
                last_s[k + 1].ok_or_else(|| {
                    ConstructionError::InsufficientData(format!("no s with dim V[s, i_{t} + 1] = {}", k + 1))
                })
            })
            .collect::<Result<_, _>>()?;
        u.push(row.iter().map(|&s| span(&points[s..=it])).collect());
        v.push(row.iter().map(|&s| span(&points[s..=it + 1])).collect());
        s_table.push(row);
    }
    let head_spans = indices.iter().map(|&it| span(&points[i0..=it])).collect();
    let head_spans_next = indices.iter().map(|&it| span(&points[i0..=it + 1])).collect();
    Ok(SubspaceFamily { n, i0, indices: indices.to_vec(), s_table, u, v, head_spans, head_spans_next })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub t: usize,
    pub k: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub s_table_decreasing: bool,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.s_table_decreasing && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub fn verify_family_identities(fam: &SubspaceFamily) -> IdentityReport {
    let n = fam.n;
    let d = n + 1;
    let mut checks = Vec::new();
    let mut push = |name: &str, t: usize, k: usize, pass: bool| {
        checks.push(IdentityCheck { name: name.to_string(), t, k, pass });
    };
    push("whole_space", n - 1, 0, fam.head_spans_next[n - 1] == RationalSubspace::full(d));
    for t in 0..n {
        push("head_dimension", t, 0, fam.head_spans[t].dim() == t + 1);
        for k in 1..=t + 1 {
            push("dim_u", t, k, fam.u(t, k).dim() == k);
            push("dim_v", t, k + 1, fam.v(t, k + 1).dim() == k + 1);
        }
        for k in 2..=t + 1 {
            let sum = subspaces::sum(fam.u(t, k), fam.v(t, k)).expect("same ambient");
            push("v_is_sum", t, k, &sum == fam.v(t, k + 1));
            let inter = subspaces::intersect(fam.u(t, k), fam.v(t, k)).expect("same ambient");
            push("u_is_intersection", t, k, &inter == fam.u(t, k - 1));
        }
    }
    for t in 1..n {
        push("head_stable", t, 0, fam.head_spans_next[t - 1] == fam.head_spans[t]);
        push("top_u_is_head", t, t + 1, fam.u(t, t + 1) == &fam.head_spans_next[t - 1]);
        push("top_u_is_previous_v", t, t + 1, fam.u(t, t + 1) == fam.v(t - 1, t + 1));
    }
    let s_table_decreasing = fam.s_table.iter().enumerate().all(|(t, row)| {
        row[0] == fam.indices[t] && row.windows(2).all(|w| w[0] > w[1]) && *row.last().expect("k = 1 exists") >= fam.i0
    });
    IdentityReport { checks, s_table_decreasing }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub k: usize,
    pub lhs_sq: String,
    pub rhs_sq: String,
    /// `sqrt(lhs_sq / rhs_sq)`
    pub ratio: f64,
}

/// Compares `H(U_k^k) ... H(U_{n-1}^k)` with `H(V_{k-1}^{k+1}) ... H(V_{n-1}^{k+1})`.
pub fn family_height_ratio(fam: &SubspaceFamily, k: usize) -> Result<RatioReport, ConstructionError> {
    let n = fam.n;
    if k == 0 || k > n - 1 {
        return Err(ConstructionError::LevelOutOfRange { k, max: n - 1 });
    }
    let lhs: BigInt = (k..n).map(|t| fam.u(t, k).squared_height().clone()).product();
    let rhs: BigInt = (k - 1..n).map(|t| fam.v(t, k + 1).squared_height().clone()).product();
    let ratio = BigRational::new(lhs.clone(), rhs.clone()).to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(RatioReport { k, lhs_sq: lhs.to_string(), rhs_sq: rhs.to_string(), ratio })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightProductReport {
    pub i0: usize,
    pub indices: Vec<usize>,
    /// `X_{i_1} ... X_{i_{n-1}}`
    pub lhs: String,
    /// `L_{i_0} X_{i_0+1} ... L_{i_{n-1}} X_{i_{n-1}+1}`
    pub rhs: String,
    pub ratio: String,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

impl HeightProductReport {
    pub fn ratio_f64(&self) -> f64 {
        0.5 * (self.ratio_lower + self.ratio_upper)
    }
}

const PREC: u64 = 160;

fn decimal(d: &Dyadic, digits: usize) -> String {
    format_sig(&d.to_rational(), digits)
}

pub fn height_product_ratio(seq: &MinimalPointSequence, i0: usize) -> Result<HeightProductReport, ConstructionError> {
    let points = seq.points();
    let indices = select_indices(&points, i0, seq.n())?;
    let last = indices[indices.len() - 1] + 1;
    if last >= seq.entries.len() {
        return Err(ConstructionError::InsufficientData(format!("entry {last} is missing")));
    }
    let x = |i: usize| seq.entries[i].norm.to_ball(PREC);
    let l = |i: usize| seq.entries[i].l_value.to_ball(PREC);
    let lhs = indices[1..].iter().fold(Ball::from_int(1), |acc, &i| acc.mul(&x(i), PREC));
    let rhs = indices
        .iter()
        .fold(Ball::from_int(1), |acc, &i| acc.mul(&l(i), PREC).mul(&x(i + 1), PREC));
    let ratio = lhs
        .div(&rhs, PREC)
        .ok_or_else(|| ConstructionError::InsufficientData("right side not separated from 0".into()))?;
    Ok(HeightProductReport {
        i0,
        indices,
        lhs: decimal(&lhs.mid, 12),
        rhs: decimal(&rhs.mid, 12),
        ratio: decimal(&ratio.mid, 12),
        ratio_lower: ratio.lower_f64(),
        ratio_upper: ratio.upper_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceEntry {
    pub name: String,
    pub t: usize,
    pub k: usize,
    pub dim: usize,
    pub basis: Vec<Vec<String>>,
    pub squared_height: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub i0: usize,
    pub indices: Vec<usize>,
    pub s_table: Vec<Vec<usize>>,
    pub subspaces: Vec<SubspaceEntry>,
    pub identities: IdentityReport,
    pub family_ratios: Vec<RatioReport>,
    pub height_product: HeightProductReport,
}

fn entry(name: &str, t: usize, k: usize, w: &RationalSubspace) -> SubspaceEntry {
    SubspaceEntry {
        name: name.to_string(),
        t,
        k,
        dim: w.dim(),
        basis: w.basis().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        squared_height: w.squared_height().to_string(),
    }
}

/// Everything above for one starting index, ready for JSON export.
pub fn family_report(seq: &MinimalPointSequence, i0: usize) -> Result<FamilyReport, ConstructionError> {
    let points = seq.points();
    let indices = select_indices(&points, i0, seq.n())?;
    let fam = build_subspace_family(&points, &indices)?;
    let identities = verify_family_identities(&fam);
    let family_ratios = (1..fam.n).map(|k| family_height_ratio(&fam, k)).collect::<Result<Vec<_>, _>>()?;
    let height_product = height_product_ratio(seq, i0)?;
    let mut subspaces = Vec::new();
    for t in 0..fam.n {
        for k in 1..=t + 1 {
            subspaces.push(entry("U", t, k, fam.u(t, k)));
            subspaces.push(entry("V", t, k + 1, fam.v(t, k + 1)));
        }
    }
    Ok(FamilyReport { i0, indices, s_table: fam.s_table.clone(), subspaces, identities, family_ratios, height_product })
}

/// Starting indices `0..=max_i0` for which a family can be built from the sequence.
pub fn certifiable_starts(seq: &MinimalPointSequence, max_i0: usize) -> Vec<usize> {
    let points = seq.points();
    (0..=max_i0.min(points.len().saturating_sub(1)))
        .filter(|&i0| {
            select_indices(&points, i0, seq.n())
                .map(|ix| ix[ix.len() - 1] + 1 < points.len())
                .unwrap_or(false)
        })
        .collect()
}
