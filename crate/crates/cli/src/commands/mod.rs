//! One module per subcommand. Each turns validated arguments into a
//! [`Report`] and a [`Plot`].

pub mod branch_points;
pub mod continuation;
pub mod scatter;
pub mod series;
pub mod spectrum;

use specwell::branchpoints::{self, BranchPointError};
use specwell::continuation::{ContinuationError, PathError};
use specwell::perturbation::PerturbationError;
use specwell::quantization::QuantizationError;
use specwell::scattering::ScatteringError;
use specwell::{Complex64, Family};

use crate::config::ConfigFile;
use crate::error::{invalid, numeric, CliError};
use crate::report::Report;
use crate::svg::Plot;

/// Settings shared by every subcommand.
pub struct Context {
    pub file: ConfigFile,
    pub tol: f64,
}

pub struct Outcome {
    pub report: Report,
    pub plot: Plot,
}

/// Config keys every command accepts.
pub const COMMON_KEYS: [&str; 3] = ["format", "output", "tol"];

/// Singular points of `family` with modulus up to roughly `reach`.
pub fn candidates(family: Family, reach: f64) -> Result<Vec<Complex64>, CliError> {
    let n = (reach / std::f64::consts::PI).ceil() as usize + 3;
    let pts = match family {
        Family::EvenWell => branchpoints::even_branch_candidates(n),
        Family::OddWell => branchpoints::odd_branch_candidates(n),
        Family::DeltaBarrier => branchpoints::delta_branch_candidates(n),
    }
    .map_err(numeric)?;
    Ok(pts.into_iter().map(|b| b.location).collect())
}

fn nearest(points: &[Complex64], p: Complex64) -> Option<Complex64> {
    points
        .iter()
        .copied()
        .min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm()))
}

/// Maps a continuation failure to an exit class, naming the branch point
/// that blocked the path.
pub fn continuation_error(e: ContinuationError, known: &[Complex64]) -> CliError {
    let blocked = |p: Complex64| {
        nearest(known, p)
            .filter(|b| (b - p).norm() <= 0.05 * (1.0 + b.norm()))
            .map(|b| format!("{e}; nearest branch point {:.12} {:+.12}i", b.re, b.im))
    };
    match e {
        ContinuationError::BranchPointCollision { param, .. } => {
            CliError::Collision(blocked(param).unwrap_or_else(|| e.to_string()))
        }
        ContinuationError::Path(PathError::TooCloseToBranchPoint { branch_point, .. }) => {
            CliError::Collision(format!(
                "{e}; offending branch point {:.12} {:+.12}i",
                branch_point.re, branch_point.im
            ))
        }
        ContinuationError::StepUnderflow { param, .. } => match blocked(param) {
            Some(msg) => CliError::Collision(msg),
            None => numeric(e),
        },
        ContinuationError::Path(_) | ContinuationError::StartMismatch { .. } => {
            invalid(e.to_string())
        }
        ContinuationError::AnchorUnavailable { .. } => invalid(e.to_string()),
        _ => numeric(e),
    }
}

pub fn quantization_error(e: QuantizationError) -> CliError {
    match e {
        QuantizationError::TangencyDegenerate { .. }
        | QuantizationError::InvalidLambda(_)
        | QuantizationError::NonFinite => invalid(e.to_string()),
        _ => numeric(e),
    }
}

pub fn branch_error(e: BranchPointError) -> CliError {
    match e {
        BranchPointError::InvalidIndex(_) => invalid(e.to_string()),
        _ => numeric(e),
    }
}

pub fn perturbation_error(e: PerturbationError, known: &[Complex64]) -> CliError {
    match e {
        PerturbationError::InvalidLevel { .. }
        | PerturbationError::UnsupportedCenter { .. }
        | PerturbationError::InvalidOrder
        | PerturbationError::ContourRadius { .. }
        | PerturbationError::ContourHitsBranchPoint { .. } => invalid(e.to_string()),
        PerturbationError::Continuation(c) => continuation_error(c, known),
        PerturbationError::BranchPoints(b) => branch_error(b),
        _ => numeric(e),
    }
}

pub fn scattering_error(e: ScatteringError) -> CliError {
    match e {
        ScatteringError::AtPole { .. }
        | ScatteringError::OriginK
        | ScatteringError::InvalidSweep { .. }
        | ScatteringError::NonFinite => invalid(e.to_string()),
        _ => numeric(e),
    }
}

/// Requires a value that has no sensible default.
pub fn required<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| invalid(format!("--{flag} is required")))
}
