//! Bound states of the finite square well and of the delta-barrier box as
//! multivalued analytic functions of the coupling.
//!
//! The crate locates the branch points of the energy surfaces, continues
//! single levels along arbitrary parameter paths, classifies monodromy, and
//! builds strong-coupling and weak-coupling series from Cauchy integrals.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branchpoints;
pub mod continuation;
pub mod deltabarrier;
pub mod numerics;
pub mod perturbation;
pub mod quantization;
pub mod scattering;

pub use num_complex::Complex64;

pub use branchpoints::{BranchKind, BranchPoint, Family};
pub use continuation::{Chart, LevelId, LevelTrack, ParamPath};
pub use quantization::{Parity, SpectrumTable, WellLevel};
