//! Monodromy around single branch points and the per-level census.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::branchpoints::{BranchPoint, Family};

use super::{
    continue_level, Chart, ContinuationError, ContinuationSettings, LevelId, LevelTrack, ParamPath,
    PathError,
};

/// What a closed loop did to a level.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Back to the same internal value.
    Trivial,
    /// Same level, different internal value (e.g. `σ ↔ 1/σ`).
    InternalOnly,
    /// Landed on another level.
    Permuted,
    /// Landed on a value that is not a real level at the anchor.
    Unidentified,
    /// The probe could not be completed.
    Failed(String),
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Trivial => "trivial",
            Outcome::InternalOnly => "internal-only",
            Outcome::Permuted => "permuted",
            Outcome::Unidentified => "unidentified",
            Outcome::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub start: LevelId,
    pub end: Option<LevelId>,
    pub outcome: Outcome,
    pub path: ParamPath,
    pub track: LevelTrack,
}

impl MonodromyResult {
    pub fn start_internal(&self) -> Complex64 {
        self.track.first().internal
    }

    pub fn end_internal(&self) -> Complex64 {
        self.track.last().internal
    }

    pub fn start_energy(&self) -> Complex64 {
        self.track.first().energy
    }

    pub fn end_energy(&self) -> Complex64 {
        self.track.last().energy
    }
}

/// How loops are drawn.
#[derive(Debug, Clone)]
pub struct LoopOptions {
    /// `|p|` of the real anchor the loop starts and ends on.
    pub anchor_magnitude: f64,
    /// Loop radius; `None` picks a quarter of the distance to the nearest
    /// other candidate.
    pub radius: Option<f64>,
    pub turns: usize,
    pub nodes_per_turn: usize,
    /// All singular points the route has to respect.
    pub candidates: Vec<Complex64>,
    pub settings: ContinuationSettings,
}

impl LoopOptions {
    pub fn new(family: Family, candidates: &[BranchPoint]) -> Self {
        Self {
            anchor_magnitude: match family {
                Family::DeltaBarrier => 3.0,
                _ => 20.0,
            },
            radius: None,
            turns: 1,
            nodes_per_turn: 64,
            candidates: candidates.iter().map(|b| b.location).collect(),
            settings: ContinuationSettings::default(),
        }
    }

    fn radius_for(&self, target: Complex64) -> f64 {
        self.radius.unwrap_or_else(|| {
            let d = self
                .candidates
                .iter()
                .map(|c| (c - target).norm())
                .filter(|d| *d > 1e-12)
                .fold(f64::INFINITY, f64::min);
            if d.is_finite() {
                (0.25 * d).min(1.0)
            } else {
                0.5
            }
        })
    }

    /// Height of the upper corridor used to pass the well origin.
    fn corridor_height(&self) -> f64 {
        let h = self
            .candidates
            .iter()
            .filter(|c| c.im.abs() > 1e-12)
            .map(|c| 0.5 * c.im.abs())
            .fold(f64::INFINITY, f64::min);
        if h.is_finite() {
            h
        } else {
            0.5
        }
    }
}

/// A closed path from the real anchor `anchor` around `target`.
///
/// Wells: straight when the target is off the real axis or on the anchor's
/// side of the origin with no other `obstacles` on the axis in between;
/// otherwise through an upper corridor and down onto the axis next to the
/// target. Delta barrier: complex targets are approached from the left
/// half-plane.
#[allow(clippy::too_many_arguments)]
pub fn lasso(
    family: Family,
    anchor: Complex64,
    target: Complex64,
    radius: f64,
    turns: usize,
    nodes_per_turn: usize,
    corridor: f64,
    obstacles: &[Complex64],
) -> Result<ParamPath, PathError> {
    if !(radius > 0.0) || (anchor - target).norm() <= radius {
        return Err(PathError::InvalidLoop("anchor must lie outside the loop"));
    }
    let side = anchor.re.signum();
    let on_axis = target.im.abs() < 1e-12;
    let tail: Vec<Complex64> = match family {
        Family::EvenWell | Family::OddWell => {
            if target.norm() < 1e-12 {
                vec![anchor, Complex64::new(0.0, radius)]
            } else if !on_axis {
                vec![
                    anchor,
                    target + (anchor - target) / (anchor - target).norm() * radius,
                ]
            } else if target.re * side > 0.0 {
                let q = target + radius * (anchor.re - target.re).signum();
                let (lo, hi) = (q.re.min(anchor.re), q.re.max(anchor.re));
                let blocked = obstacles.iter().any(|c| {
                    c.im.abs() < 1e-12 && c.re > lo && c.re < hi && (c - target).norm() > 1e-12
                });
                if blocked {
                    vec![anchor, q + Complex64::new(0.0, corridor), q]
                } else {
                    vec![anchor, q]
                }
            } else {
                let q = target + radius * side;
                vec![anchor, q + Complex64::new(0.0, corridor), q]
            }
        }
        Family::DeltaBarrier => {
            if on_axis {
                vec![anchor, target + radius * (anchor.re - target.re).signum()]
            } else {
                let x = -(target.re.abs().max(1.0) + 2.0 + radius);
                vec![
                    anchor,
                    Complex64::new(x, 0.0),
                    Complex64::new(x, target.im),
                    target - radius,
                ]
            }
        }
    };
    let q = *tail.last().unwrap();
    let theta0 = (q - target).arg();
    let circle = ParamPath::circle(target, radius, theta0, nodes_per_turn, turns)?;
    let mut pts = tail.clone();
    pts.extend_from_slice(&circle.waypoints()[1..]);
    pts.extend(tail.iter().rev().skip(1));
    ParamPath::closed(pts)
}

/// Loops the real level `level` around `target` and classifies the result.
pub fn monodromy(
    chart: &dyn Chart,
    level: usize,
    target: Complex64,
    options: &LoopOptions,
) -> Result<MonodromyResult, ContinuationError> {
    let anchor = chart.anchor(level, options.anchor_magnitude)?;
    let radius = options.radius_for(target);
    let path = lasso(
        chart.family(),
        anchor.param,
        target,
        radius,
        options.turns,
        options.nodes_per_turn,
        options.corridor_height(),
        &options.candidates,
    )?;
    let track = continue_level(
        chart,
        anchor.param,
        anchor.internal,
        &path,
        &options.settings,
    )?;
    let start = chart
        .identify(anchor.param.re, anchor.internal)
        .unwrap_or(LevelId::plain(level));
    let w0 = anchor.internal;
    let w1 = track.last().internal;
    let (end, outcome) = if (w1 - w0).norm() <= 1e-8 * (1.0 + w0.norm()) {
        (Some(start), Outcome::Trivial)
    } else {
        match chart.identify(anchor.param.re, w1) {
            Some(id) if id.index == start.index => (Some(id), Outcome::InternalOnly),
            Some(id) => (Some(id), Outcome::Permuted),
            None => (None, Outcome::Unidentified),
        }
    };
    Ok(MonodromyResult {
        start,
        end,
        outcome,
        path,
        track,
    })
}

#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub branch_point: BranchPoint,
    pub outcome: Outcome,
    pub end: Option<LevelId>,
}

#[derive(Debug, Clone)]
pub struct CensusRow {
    pub level: usize,
    pub entries: Vec<CensusEntry>,
}

impl CensusRow {
    /// Candidates whose loop changes the level.
    pub fn permuting(&self) -> impl Iterator<Item = &CensusEntry> {
        self.entries
            .iter()
            .filter(|e| e.outcome == Outcome::Permuted)
    }

    /// Candidates whose loop changes anything at all.
    pub fn nontrivial(&self) -> impl Iterator<Item = &CensusEntry> {
        self.entries
            .iter()
            .filter(|e| e.outcome != Outcome::Trivial)
    }
}

/// Probes every candidate branch point from every level in `levels`.
///
/// Probes are independent and run in parallel; the output order follows
/// `levels` then `candidates`.
pub fn sheet_census(
    chart: &dyn Chart,
    levels: std::ops::RangeInclusive<usize>,
    candidates: &[BranchPoint],
    options: &LoopOptions,
) -> Vec<CensusRow> {
    let jobs: Vec<(usize, BranchPoint)> = levels
        .flat_map(|l| candidates.iter().map(move |b| (l, *b)))
        .collect();
    let results: Vec<(usize, CensusEntry)> = jobs
        .par_iter()
        .map(|&(level, bp)| {
            let entry = match monodromy(chart, level, bp.location, options) {
                Ok(m) => CensusEntry {
                    branch_point: bp,
                    outcome: m.outcome,
                    end: m.end,
                },
                Err(e) => CensusEntry {
                    branch_point: bp,
                    outcome: Outcome::Failed(e.to_string()),
                    end: None,
                },
            };
            (level, entry)
        })
        .collect();
    let mut rows: Vec<CensusRow> = Vec::new();
    for (level, entry) in results {
        match rows.last_mut() {
            Some(row) if row.level == level => row.entries.push(entry),
            _ => rows.push(CensusRow {
                level,
                entries: vec![entry],
            }),
        }
    }
    rows
}
