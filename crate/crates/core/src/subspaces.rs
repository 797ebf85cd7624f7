//! Rational subspaces of `Q^d` represented by saturated integer bases, and their heights.
//!
//! A subspace `W` is stored through the Hermite normal form of `W ∩ Z^d`, which is unique,
//! so two subspaces are equal exactly when their stored bases are equal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, IntVec};
use crate::rigorous::RigorousReal;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("ambient dimensions differ: {0} and {1}")]
    AmbientMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RationalSubspace {
    ambient: usize,
    basis: Vec<IntVec>,
    #[serde(serialize_with = "crate::subspaces::ser_bigint")]
    squared_height: BigInt,
}

pub(crate) fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl RationalSubspace {
    fn from_lattice_basis(ambient: usize, basis: Vec<IntVec>) -> Self {
        let squared_height = if basis.is_empty() { BigInt::one() } else { linalg::gram_det(&basis) };
        RationalSubspace { ambient, basis, squared_height }
    }

    pub fn zero(ambient: usize) -> Self {
        Self::from_lattice_basis(ambient, Vec::new())
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_lattice_basis(ambient, linalg::identity(ambient))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Hermite-form basis of `W ∩ Z^d`.
    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    pub fn squared_height(&self) -> &BigInt {
        &self.squared_height
    }

    /// `H(W)`; exact when the squared height is a perfect square.
    pub fn height(&self) -> RigorousReal {
        let h = RigorousReal::sqrt_int(&self.squared_height);
        h.refine(64).unwrap_or(h)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut e = linalg::EchelonBasis::new();
        for b in &self.basis {
            e.insert(b);
        }
        e.contains(v)
    }

    pub fn is_subspace_of(&self, other: &RationalSubspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    /// `W⊥` for the standard inner product.
    pub fn orthogonal_complement(&self) -> RationalSubspace {
        Self::from_lattice_basis(self.ambient, linalg::integer_kernel(&self.basis, self.ambient))
    }

    /// Squared height recomputed from Plücker coordinates, as a cross-check of the Gram value.
    pub fn plucker_squared_height(&self) -> BigInt {
        linalg::plucker_norm_sq(&self.basis)
    }
}

/// The subspace spanned by `vectors`, with a basis of all its integer points.
pub fn saturate(ambient: usize, vectors: &[IntVec]) -> RationalSubspace {
    // W ∩ Z^d = (W⊥)⊥ ∩ Z^d, and integer kernels are saturated by construction
    let perp = linalg::integer_kernel(vectors, ambient);
    RationalSubspace::from_lattice_basis(ambient, linalg::integer_kernel(&perp, ambient))
}

pub fn saturate_i64(ambient: usize, vectors: &[Vec<i64>]) -> RationalSubspace {
    saturate(ambient, &linalg::to_big(vectors))
}

fn check_ambient(a: &RationalSubspace, b: &RationalSubspace) -> Result<(), SubspaceError> {
    if a.ambient != b.ambient {
        return Err(SubspaceError::AmbientMismatch(a.ambient, b.ambient));
    }
    Ok(())
}

pub fn sum(a: &RationalSubspace, b: &RationalSubspace) -> Result<RationalSubspace, SubspaceError> {
    check_ambient(a, b)?;
    let mut rows = a.basis.clone();
    rows.extend(b.basis.iter().cloned());
    Ok(saturate(a.ambient, &rows))
}

pub fn intersect(a: &RationalSubspace, b: &RationalSubspace) -> Result<RationalSubspace, SubspaceError> {
    check_ambient(a, b)?;
    // A ∩ B = (A⊥ + B⊥)⊥
    let mut rows = linalg::integer_kernel(&a.basis, a.ambient);
    rows.extend(linalg::integer_kernel(&b.basis, b.ambient));
    let basis = linalg::integer_kernel(&rows, a.ambient);
    Ok(RationalSubspace::from_lattice_basis(a.ambient, basis))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchmidtReport {
    /// `H(A+B)^2 H(A∩B)^2`
    #[serde(serialize_with = "ser_bigint")]
    pub lhs_sq: BigInt,
    /// `H(A)^2 H(B)^2`
    #[serde(serialize_with = "ser_bigint")]
    pub rhs_sq: BigInt,
    #[serde(serialize_with = "ser_rational")]
    pub ratio_sq: BigRational,
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn schmidt_ratio(a: &RationalSubspace, b: &RationalSubspace) -> Result<SchmidtReport, SubspaceError> {
    let s = sum(a, b)?;
    let i = intersect(a, b)?;
    let lhs_sq = s.squared_height() * i.squared_height();
    let rhs_sq = a.squared_height() * b.squared_height();
    let ratio_sq = BigRational::new(lhs_sq.clone(), rhs_sq.clone());
    Ok(SchmidtReport { lhs_sq, rhs_sq, ratio_sq })
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzWitness {
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub count: usize,
    pub dims: Vec<usize>,
    #[serde(serialize_with = "ser_rational")]
    pub max_ratio_sq: BigRational,
    pub max_ratio_sq_f64: f64,
    pub witness: FuzzWitness,
    pub nontrivial_intersections: usize,
    pub duality_checks: usize,
    pub duality_failures: usize,
    pub plucker_mismatches: usize,
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> IntVec {
    (0..d).map(|_| BigInt::from(rng.gen_range(-4i64..=4))).collect()
}

/// Random pairs `(A, B)` sharing a random common part, so that `A ∩ B` is often nontrivial.
pub fn random_pair(rng: &mut ChaCha8Rng, d: usize) -> (RationalSubspace, RationalSubspace) {
    let common = rng.gen_range(0..d);
    let shared: Vec<IntVec> = (0..common).map(|_| random_vector(rng, d)).collect();
    let build = |rng: &mut ChaCha8Rng| {
        let extra = rng.gen_range(0..=d - common);
        let mut v = shared.clone();
        v.extend((0..extra).map(|_| random_vector(rng, d)));
        // occasionally scale a vector to exercise saturation
        if !v.is_empty() && rng.gen_bool(0.3) {
            let k = rng.gen_range(0..v.len());
            let f = BigInt::from(rng.gen_range(2i64..=5));
            v[k] = v[k].iter().map(|x| x * &f).collect();
        }
        saturate(d, &v)
    };
    let a = build(rng);
    let b = build(rng);
    (a, b)
}

/// Schmidt ratios over `count` random pairs, with ambient dimensions drawn from `dims`.
pub fn schmidt_fuzz(dims: &[usize], count: usize, seed: u64) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = BigRational::zero();
    let mut witness = FuzzWitness { a: Vec::new(), b: Vec::new() };
    let mut nontrivial = 0;
    let mut duality_checks = 0;
    let mut duality_failures = 0;
    let mut plucker_mismatches = 0;
    let strings = |w: &RationalSubspace| -> Vec<Vec<String>> {
        w.basis().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    };
    for _ in 0..count {
        let d = dims[rng.gen_range(0..dims.len())];
        let (a, b) = random_pair(&mut rng, d);
        let r = schmidt_ratio(&a, &b).expect("same ambient");
        let inter = intersect(&a, &b).expect("same ambient");
        if inter.dim() > 0 {
            nontrivial += 1;
        }
        let s = sum(&a, &b).expect("same ambient");
        for w in [&a, &b, &s, &inter] {
            duality_checks += 1;
            if w.orthogonal_complement().squared_height() != w.squared_height() {
                duality_failures += 1;
            }
            if &w.plucker_squared_height() != w.squared_height() {
                plucker_mismatches += 1;
            }
        }
        if r.ratio_sq > max_ratio {
            max_ratio = r.ratio_sq.clone();
            witness = FuzzWitness { a: strings(&a), b: strings(&b) };
        }
    }
    FuzzReport {
        seed,
        count,
        dims: dims.to_vec(),
        max_ratio_sq_f64: max_ratio.to_f64().unwrap_or(f64::NAN),
        max_ratio_sq: max_ratio,
        witness,
        nontrivial_intersections: nontrivial,
        duality_checks,
        duality_failures,
        plucker_mismatches,
    }
}
