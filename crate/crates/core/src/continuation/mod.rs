//! Predictor-corrector continuation of single levels along parameter paths.

mod census;
mod charts;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::branchpoints::Family;
use crate::numerics::is_finite;

pub use census::{
    lasso, monodromy, sheet_census, CensusEntry, CensusRow, LoopOptions, MonodromyResult, Outcome,
};
pub(crate) use charts::delta_real_momentum;
pub use charts::{
    cos_sqrt, default_chart, sinc_sqrt, sinc_sqrt_derivative, Anchor, Chart, DeltaEnergy,
    DeltaMomentum, EvenPhase, LevelId, OddEnergy, OddPhase,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error("path runs into a branch point near parameter {param} (internal {internal})")]
    BranchPointCollision {
        param: Complex64,
        internal: Complex64,
    },
    #[error("step size underflow at parameter {param} while heading to {target}")]
    StepUnderflow { param: Complex64, target: Complex64 },
    #[error("start point is off the level surface (scaled residual {residual:e})")]
    StartOffShell { residual: f64 },
    #[error("start parameter {start} differs from the first waypoint {waypoint}")]
    StartMismatch {
        start: Complex64,
        waypoint: Complex64,
    },
    #[error("level {level} has no real anchor at |p| = {magnitude}")]
    AnchorUnavailable { level: usize, magnitude: f64 },
    #[error("contour of radius {radius} did not close (mismatch {mismatch:e})")]
    NotClosed { radius: f64, mismatch: f64 },
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("a path needs at least two waypoints")]
    TooFewWaypoints,
    #[error("non-finite waypoint")]
    NonFinite,
    #[error("closed path does not end where it starts")]
    NotClosed,
    #[error("waypoint {waypoint} lies within the exclusion radius of branch point {branch_point}")]
    TooCloseToBranchPoint {
        waypoint: Complex64,
        branch_point: Complex64,
    },
    #[error("invalid loop: {0}")]
    InvalidLoop(&'static str),
}

/// Piecewise-linear path in the parameter plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPath {
    waypoints: Vec<Complex64>,
    closed: bool,
}

impl ParamPath {
    pub fn open(waypoints: Vec<Complex64>) -> Result<Self, PathError> {
        if waypoints.len() < 2 {
            return Err(PathError::TooFewWaypoints);
        }
        if waypoints.iter().any(|w| !is_finite(*w)) {
            return Err(PathError::NonFinite);
        }
        Ok(Self {
            waypoints,
            closed: false,
        })
    }

    pub fn closed(waypoints: Vec<Complex64>) -> Result<Self, PathError> {
        let mut p = Self::open(waypoints)?;
        let (a, b) = (p.waypoints[0], *p.waypoints.last().unwrap());
        if (a - b).norm() > 1e-12 * (1.0 + a.norm()) {
            return Err(PathError::NotClosed);
        }
        *p.waypoints.last_mut().unwrap() = a;
        p.closed = true;
        Ok(p)
    }

    /// Counterclockwise circle through `center + radius·e^{iθ₀}`, traversed
    /// `turns` times with `nodes` vertices per turn.
    pub fn circle(
        center: Complex64,
        radius: f64,
        start_angle: f64,
        nodes: usize,
        turns: usize,
    ) -> Result<Self, PathError> {
        if !(radius > 0.0) || nodes < 3 || turns == 0 {
            return Err(PathError::InvalidLoop(
                "circle needs radius > 0, nodes >= 3, turns >= 1",
            ));
        }
        let total = nodes * turns;
        let pts = (0..=total)
            .map(|j| {
                center
                    + Complex64::from_polar(
                        radius,
                        start_angle + 2.0 * PI * j as f64 / nodes as f64,
                    )
            })
            .collect();
        Self::closed(pts)
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Complex64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().unwrap()
    }

    /// Rejects waypoints within `1e-3 ×` (distance to the nearest other
    /// branch point) of any branch point in `points`.
    pub fn check_clearance(&self, points: &[Complex64]) -> Result<(), PathError> {
        for (i, &b) in points.iter().enumerate() {
            let nearest = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| (q - b).norm())
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min);
            let radius = if nearest.is_finite() {
                1e-3 * nearest
            } else {
                1e-3
            };
            if let Some(&w) = self.waypoints.iter().find(|w| (*w - b).norm() < radius) {
                return Err(PathError::TooCloseToBranchPoint {
                    waypoint: w,
                    branch_point: b,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample {
    pub param: Complex64,
    pub internal: Complex64,
    pub energy: Complex64,
}

/// The continued level along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrack {
    pub family: Family,
    pub chart: &'static str,
    pub samples: Vec<TrackSample>,
    /// Sample index reached at each waypoint.
    pub waypoint_samples: Vec<usize>,
    /// `ln σ` branch of the final sample (phase charts), else 0.
    pub log_branch: i64,
}

impl LevelTrack {
    pub fn first(&self) -> &TrackSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrackSample {
        self.samples.last().expect("a track always holds its start")
    }

    /// Samples sitting exactly on the path's waypoints.
    pub fn at_waypoints(&self) -> impl Iterator<Item = &TrackSample> {
        self.waypoint_samples.iter().map(move |&i| &self.samples[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationSettings {
    /// First step as a fraction of the first segment.
    pub initial_fraction: f64,
    /// Newton stops once the scaled residual is below this.
    pub newton_tol: f64,
    /// A corrected point is accepted only below this scaled residual.
    pub accept_tol: f64,
    pub max_newton: usize,
    /// Corrections larger than this fraction of the predicted step are
    /// rejected.
    pub max_correction_ratio: f64,
    /// Minimum parameter step, relative to `max(1, |segment|)`.
    pub min_step: f64,
    /// `|dp/dw|` below this means the path sits on a branch point.
    pub collision_threshold: f64,
    /// Consecutive easy steps before the step doubles.
    pub growth_after: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            initial_fraction: 0.25,
            newton_tol: 1e-14,
            accept_tol: 1e-10,
            max_newton: 12,
            max_correction_ratio: 0.1,
            min_step: 1e-9,
            collision_threshold: 1e-8,
            growth_after: 4,
        }
    }
}

fn correct<C: Chart + ?Sized>(
    chart: &C,
    mut w: Complex64,
    p: Complex64,
    s: &ContinuationSettings,
) -> Option<Complex64> {
    for _ in 0..s.max_newton {
        let r = chart.condition(w, p);
        if !is_finite(r) {
            return None;
        }
        let scale = 1.0 + chart.residual_scale(w, p);
        if r.norm() <= s.newton_tol * scale {
            return Some(w);
        }
        let d = chart.condition_derivative(w, p);
        if d.norm() == 0.0 || !is_finite(d) {
            return None;
        }
        let step = r / d;
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + w.norm()) {
            break;
        }
    }
    (chart.scaled_residual(w, p) <= s.accept_tol).then_some(w)
}

/// Continues the level through `(start_param, start_internal)` along `path`.
///
/// The predictor is the tangent step `Δw = Δp / p'(w)`; the corrector is
/// Newton on `G(·, p)` at the new parameter. Steps are halved whenever the
/// correction exceeds a tenth of the predicted step or Newton fails, and
/// doubled after a run of easy steps.
pub fn continue_level<C: Chart + ?Sized>(
    chart: &C,
    start_param: Complex64,
    start_internal: Complex64,
    path: &ParamPath,
    settings: &ContinuationSettings,
) -> Result<LevelTrack, ContinuationError> {
    if (start_param - path.start()).norm() > 1e-12 * (1.0 + start_param.norm()) {
        return Err(ContinuationError::StartMismatch {
            start: start_param,
            waypoint: path.start(),
        });
    }
    let residual = chart.scaled_residual(start_internal, start_param);
    if !(residual <= settings.accept_tol) {
        return Err(ContinuationError::StartOffShell { residual });
    }
    let sample = |p: Complex64, w: Complex64| TrackSample {
        param: p,
        internal: w,
        energy: chart.energy(w),
    };
    let mut samples = vec![sample(start_param, start_internal)];
    let mut waypoint_samples = vec![0];
    let (mut p, mut w) = (start_param, start_internal);
    let mut step_abs: Option<f64> = None;

    for seg in path.waypoints().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            waypoint_samples.push(samples.len() - 1);
            continue;
        }
        let floor = settings.min_step * len.max(1.0) / len;
        let mut t = 0.0;
        let mut h = step_abs
            .map_or(settings.initial_fraction, |s| s / len)
            .min(1.0);
        let mut easy = 0;
        while t < 1.0 {
            let h_try = h.min(1.0 - t);
            let last = t + h_try >= 1.0;
            let p_new = if last { b } else { a + (b - a) * (t + h_try) };
            let dp = chart.parameter_derivative(w);
            if dp.norm() < settings.collision_threshold {
                return Err(ContinuationError::BranchPointCollision {
                    param: p,
                    internal: w,
                });
            }
            let dw = (p_new - p) / dp;
            let accepted = if dw.norm() <= chart.max_step(w) {
                let predicted = w + dw;
                correct(chart, predicted, p_new, settings).filter(|wn| {
                    (wn - predicted).norm()
                        <= settings.max_correction_ratio * dw.norm() + 1e-13 * (1.0 + w.norm())
                })
            } else {
                None
            };
            match accepted {
                Some(wn) => {
                    t = if last { 1.0 } else { t + h_try };
                    w = wn;
                    p = p_new;
                    samples.push(sample(p, w));
                    easy += 1;
                    if easy >= settings.growth_after {
                        h *= 2.0;
                        easy = 0;
                    }
                }
                None => {
                    h = h_try * 0.5;
                    easy = 0;
                    if h < floor {
                        return Err(ContinuationError::StepUnderflow {
                            param: p,
                            target: b,
                        });
                    }
                }
            }
        }
        step_abs = Some(h * len);
        waypoint_samples.push(samples.len() - 1);
    }

    Ok(LevelTrack {
        family: chart.family(),
        chart: chart.name(),
        log_branch: chart.log_branch(w),
        samples,
        waypoint_samples,
    })
}

/// Continues from a chart anchor for `level` along `path` (which must start
/// at the anchor's parameter).
pub fn continue_from_anchor<C: Chart + ?Sized>(
    chart: &C,
    anchor: &Anchor,
    path: &ParamPath,
    settings: &ContinuationSettings,
) -> Result<LevelTrack, ContinuationError> {
    continue_level(chart, anchor.param, anchor.internal, path, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_axis_track_matches_spectrum() {
        let a = EvenPhase.anchor(1, 20.0).unwrap();
        let path = ParamPath::open(vec![a.param, c(2.0, 0.0)]).unwrap();
        let t =
            continue_level(&EvenPhase, a.param, a.internal, &path, &Default::default()).unwrap();
        assert!((t.last().internal.re - 1.0298665293222588).abs() < 1e-10);
        assert!(t.last().internal.im.abs() < 1e-12);
    }

    #[test]
    fn closed_circle_without_branch_points_returns() {
        let a = EvenPhase.anchor(1, 20.0).unwrap();
        let path = ParamPath::circle(c(0.0, 0.0), 20.0, 0.0, 64, 1).unwrap();
        let t =
            continue_level(&EvenPhase, a.param, a.internal, &path, &Default::default()).unwrap();
        // The ground sheet encloses ±λ₁ and the ±λ₂ pair; a large circle
        // still comes back to the ground level.
        assert!((t.last().internal - a.internal).norm() < 1e-9);
    }

    #[test]
    fn start_must_be_on_shell() {
        let path = ParamPath::open(vec![c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let err = continue_level(
            &EvenPhase,
            c(2.0, 0.0),
            c(0.5, 0.0),
            &path,
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ContinuationError::StartOffShell { .. }));
    }

    #[test]
    fn hitting_a_branch_point_is_reported() {
        // Level 2 along the real axis straight into λ₂.
        let a = EvenPhase.anchor(2, 20.0).unwrap();
        let lam2 = crate::branchpoints::even_pseudothresholds(2).unwrap()[0].location;
        let path = ParamPath::open(vec![a.param, lam2]).unwrap();
        let err = continue_level(&EvenPhase, a.param, a.internal, &path, &Default::default())
            .unwrap_err();
        assert!(matches!(
            err,
            ContinuationError::BranchPointCollision { .. }
                | ContinuationError::StepUnderflow { .. }
        ));
    }

    #[test]
    fn clearance_check() {
        let path = ParamPath::open(vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(path
            .check_clearance(&[c(1.0000001, 0.0), c(5.0, 0.0)])
            .is_err());
        assert!(path.check_clearance(&[c(1.1, 0.0), c(5.0, 0.0)]).is_ok());
    }
}
