//! Adaptive-precision enclosures of real numbers.
//!
//! Every real quantity in the crate (target coordinates, linear form values, norms) is a
//! [`RigorousReal`]: a descriptor plus a rational midpoint-radius enclosure that can be
//! tightened on request. Comparisons are three-valued, so a decision is either certified
//! or reported as [`Comparison::Indistinguishable`].

mod ball;
mod dyadic;
mod poly;
mod real;

pub use ball::Ball;
pub use dyadic::{Dyadic, Round};
pub use poly::IntPoly;
pub use real::{compare, Comparison, Enclosure, Op, RigorousReal, START_BITS};

use thiserror::Error;

/// Hard ceiling on working precision unless a caller passes its own cap.
pub const DEFAULT_PRECISION_CAP: u64 = 1 << 16;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RigorousError {
    #[error("interval does not isolate a single root (found {roots})")]
    NoSignChange { roots: usize },
    #[error("polynomial is not square-free")]
    NotSquareFree,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("requested {requested} bits exceeds precision cap {cap}")]
    PrecisionCapExceeded { requested: u64, cap: u64 },
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("invalid numeric literal {0:?}")]
    InvalidLiteral(String),
    #[error("operator {op} cannot take {got} arguments")]
    Arity { op: String, got: usize },
}
