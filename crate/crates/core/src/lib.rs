//! Certified computations for simultaneous rational approximation to a real point.

pub mod rigorous;
pub mod linalg;
pub mod model;
pub mod minpoints;
pub mod subspaces;
pub mod construction;
pub mod transference;
pub mod spectra;
pub mod presets;
