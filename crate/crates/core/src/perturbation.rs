//! Convergent strong- and weak-coupling series from Cauchy integrals.
//!
//! A level's sheet is holomorphic outside a circle enclosing all of its
//! branch points, so `E(λ) = E∞ + Σ_{k≥0} a_k λ^{−(k+1)}` with
//! `a_k = (1/2πi) ∮ E(λ) λ^k dλ`. The integrand is sampled once by
//! continuing the level around the circle. Delta-barrier levels also get a
//! Taylor series about `g = 0`, inside the nearest branch point.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::branchpoints::{self, BranchPointError, Family};
use crate::continuation::{
    continue_level, default_chart, Anchor, Chart, ContinuationError, ContinuationSettings,
    ParamPath,
};
use crate::numerics::{self, ls_slope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesCenter {
    /// Series in `1/p` about `p = ∞`.
    Infinity,
    /// Taylor series in `p` about `p = 0`.
    Origin,
}

impl SeriesCenter {
    pub fn name(self) -> &'static str {
        match self {
            SeriesCenter::Infinity => "infinity",
            SeriesCenter::Origin => "origin",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbationError {
    #[error("level {level} does not exist in the {family} family")]
    InvalidLevel { family: &'static str, level: usize },
    #[error("the {family} family has no series about {center}")]
    UnsupportedCenter {
        family: &'static str,
        center: &'static str,
    },
    #[error("series order must be at least 1")]
    InvalidOrder,
    #[error("contour radius {radius} does not {relation} the branch points of the sheet (limit {limit})")]
    ContourRadius {
        radius: f64,
        limit: f64,
        relation: &'static str,
    },
    #[error("contour radius {radius} passes through branch point {location}")]
    ContourHitsBranchPoint { radius: f64, location: Complex64 },
    #[error("node count did not settle below {max_nodes}")]
    QuadratureNoConvergence { max_nodes: usize },
    #[error("fewer than 10 usable coefficients")]
    DegenerateCoefficients,
    #[error(transparent)]
    Continuation(#[from] ContinuationError),
    #[error(transparent)]
    BranchPoints(#[from] BranchPointError),
}

pub type Result<T> = std::result::Result<T, PerturbationError>;

/// A truncated expansion `E = leading + Σ_k a_k x^{k+1}`, with `x = 1/p`
/// about infinity and `x = p` about the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    pub family: Family,
    pub level: usize,
    pub center: SeriesCenter,
    pub leading_term: f64,
    /// `(1/N) Σ E_n`: the quadrature's own constant term, a check on
    /// `leading_term`.
    pub quadrature_constant: Complex64,
    pub coefficients: Vec<Complex64>,
    pub contour_radius: f64,
    pub estimated_radius: f64,
    pub nodes: usize,
    /// Where the contour pass started.
    pub start: Anchor,
    pub closure_mismatch: f64,
}

impl SeriesExpansion {
    fn variable(&self, p: Complex64) -> Complex64 {
        match self.center {
            SeriesCenter::Infinity => p.inv(),
            SeriesCenter::Origin => p,
        }
    }

    /// Partial sum with the first `terms` coefficients.
    pub fn partial_sum(&self, p: Complex64, terms: usize) -> Complex64 {
        let x = self.variable(p);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.coefficients[..terms.min(self.coefficients.len())]
            .iter()
            .rev()
        {
            acc = (acc + a) * x;
        }
        acc + self.leading_term
    }

    pub fn evaluate(&self, p: Complex64) -> Complex64 {
        self.partial_sum(p, self.coefficients.len())
    }
}

/// The coupling limit a level's sheet tends to at the series center.
///
/// Wells at infinity: `(mπ/2)²` for physical-type levels (odd `m` even
/// parity, even `m` odd parity), `((m−1)π/2)²` for their partners. Delta
/// barrier: `(lπ)²` at infinity (right half-plane), `((l−½)π)²` at zero.
pub fn leading_term(family: Family, level: usize, center: SeriesCenter) -> Result<f64> {
    let invalid = PerturbationError::InvalidLevel {
        family: family.name(),
        level,
    };
    let m = level as f64;
    match (family, center) {
        (Family::EvenWell, SeriesCenter::Infinity) => match level {
            0 => Err(invalid),
            _ if level % 2 == 1 => Ok((m * PI / 2.0).powi(2)),
            _ => Ok(((m - 1.0) * PI / 2.0).powi(2)),
        },
        (Family::OddWell, SeriesCenter::Infinity) => match level {
            0 | 1 => Err(invalid),
            _ if level.is_multiple_of(2) => Ok((m * PI / 2.0).powi(2)),
            _ => Ok(((m - 1.0) * PI / 2.0).powi(2)),
        },
        (Family::DeltaBarrier, _) if level == 0 => Err(invalid),
        (Family::DeltaBarrier, SeriesCenter::Infinity) => Ok((m * PI).powi(2)),
        (Family::DeltaBarrier, SeriesCenter::Origin) => Ok(((m - 0.5) * PI).powi(2)),
        (_, SeriesCenter::Origin) => Err(PerturbationError::UnsupportedCenter {
            family: family.name(),
            center: center.name(),
        }),
    }
}

/// For infinity: the smallest admissible radius (largest branch point
/// modulus on the level's sheet). For the origin: the largest one.
pub fn radius_limit(family: Family, level: usize, center: SeriesCenter) -> Result<f64> {
    leading_term(family, level, center)?;
    match (family, center) {
        (Family::EvenWell, _) => {
            let n = match level % 4 {
                1 | 2 => 2 * (level / 4) + 2,
                _ => 2 * level.div_ceil(4) + 1,
            };
            Ok(branchpoints::even_pseudothresholds(n)?
                .last()
                .unwrap()
                .location
                .norm())
        }
        (Family::OddWell, _) => {
            let p = level / 2;
            Ok(branchpoints::odd_pseudothresholds(p)?[p].location.norm())
        }
        (Family::DeltaBarrier, SeriesCenter::Infinity) => {
            Ok(branchpoints::delta_branchpoints(level + 1)?[level + 1]
                .location
                .norm())
        }
        (Family::DeltaBarrier, SeriesCenter::Origin) => {
            let l = level.saturating_sub(1).max(1);
            Ok(branchpoints::delta_branchpoints(l)?[l].location.norm())
        }
    }
}

/// Default contour: `1.25×` the limit for the wells, `1.1|g_{l+1}|` and
/// `0.9|g_{max(l−1,1)}|` for the delta barrier.
pub fn default_radius(family: Family, level: usize, center: SeriesCenter) -> Result<f64> {
    let limit = radius_limit(family, level, center)?;
    Ok(match (family, center) {
        (Family::DeltaBarrier, SeriesCenter::Infinity) => 1.1 * limit,
        (Family::DeltaBarrier, SeriesCenter::Origin) => 0.9 * limit,
        _ => 1.25 * limit,
    })
}

fn family_points_near(family: Family, radius: f64) -> Result<Vec<Complex64>> {
    let mut pts = Vec::new();
    match family {
        Family::EvenWell => {
            for bp in branchpoints::even_branch_candidates(2)? {
                pts.push(bp.location);
            }
            let mut n = 3;
            loop {
                let bp = *branchpoints::even_pseudothresholds(n)?.last().unwrap();
                pts.push(bp.location);
                if bp.location.norm() > 2.0 * radius {
                    break;
                }
                n += 1;
            }
        }
        Family::OddWell => {
            let mut k = 1;
            pts.push(Complex64::new(1.0, 0.0));
            loop {
                let bp = branchpoints::odd_pseudothresholds(k)?[k];
                pts.push(bp.location);
                if bp.location.norm() > 2.0 * radius {
                    break;
                }
                k += 1;
            }
        }
        Family::DeltaBarrier => {
            pts.push(Complex64::new(-1.0, 0.0));
            let mut l = 1;
            loop {
                let bp = branchpoints::delta_branchpoints(l)?[l];
                pts.push(bp.location);
                pts.push(bp.location.conj());
                if bp.location.norm() > 2.0 * radius {
                    break;
                }
                l += 1;
            }
        }
    }
    Ok(pts)
}

const MIN_NODES: usize = 256;
const MAX_NODES: usize = 1 << 16;

/// Level values at `N` equispaced contour nodes, by one continuation pass.
fn contour_values(
    chart: &dyn Chart,
    start: &Anchor,
    radius: f64,
    nodes: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>, f64)> {
    let theta0 = start.param.arg();
    let path = ParamPath::circle(Complex64::new(0.0, 0.0), radius, theta0, nodes, 1)
        .map_err(ContinuationError::from)?;
    let track = continue_level(
        chart,
        start.param,
        start.internal,
        &path,
        &ContinuationSettings::default(),
    )?;
    let pts: Vec<_> = track.at_waypoints().copied().collect();
    let end = pts.last().unwrap().internal;
    let mismatch = (end - start.internal).norm() / (1.0 + start.internal.norm());
    if mismatch > 1e-9 {
        return Err(ContinuationError::NotClosed { radius, mismatch }.into());
    }
    let params = pts[..nodes].iter().map(|s| s.param).collect();
    let energies = pts[..nodes].iter().map(|s| s.energy).collect();
    Ok((params, energies, mismatch))
}

fn moments(
    params: &[Complex64],
    energies: &[Complex64],
    center: SeriesCenter,
    count: usize,
) -> Vec<Complex64> {
    let n = params.len() as f64;
    (0..count)
        .map(|k| {
            let power = match center {
                SeriesCenter::Infinity => k as i32 + 1,
                SeriesCenter::Origin => -(k as i32 + 1),
            };
            params
                .iter()
                .zip(energies)
                .map(|(p, e)| e * p.powi(power))
                .sum::<Complex64>()
                / n
        })
        .collect()
}

/// Series coefficients of `level` about `center` from a circle of radius
/// `contour_radius` (or the default).
///
/// The node count doubles from 256 until `a_0..a_9` change by less than
/// `1e-12` of their natural scale `max|E|·R^{±(k+1)}`.
pub fn series_coefficients(
    family: Family,
    level: usize,
    order: usize,
    contour_radius: Option<f64>,
    center: SeriesCenter,
) -> Result<SeriesExpansion> {
    if order < 1 {
        return Err(PerturbationError::InvalidOrder);
    }
    let leading = leading_term(family, level, center)?;
    let limit = radius_limit(family, level, center)?;
    let radius = match contour_radius {
        Some(r) => r,
        None => default_radius(family, level, center)?,
    };
    let fits = match center {
        SeriesCenter::Infinity => radius > limit * 1.001,
        SeriesCenter::Origin => radius < limit * 0.999 && radius > 0.0,
    };
    if !radius.is_finite() || !fits {
        let relation = match center {
            SeriesCenter::Infinity => "enclose",
            SeriesCenter::Origin => "stay inside",
        };
        return Err(PerturbationError::ContourRadius {
            radius,
            limit,
            relation,
        });
    }
    if let Some(&location) = family_points_near(family, radius)?
        .iter()
        .find(|p| (p.norm() - radius).abs() < 1e-3 * radius)
    {
        return Err(PerturbationError::ContourHitsBranchPoint { radius, location });
    }
    let chart = default_chart(family);
    let start = chart.anchor(level, radius)?;

    let mut nodes = MIN_NODES;
    let (params, energies, _) = contour_values(chart, &start, radius, nodes)?;
    let mut coeffs = moments(&params, &energies, center, order.max(10));
    let (energies, mismatch) = loop {
        if 2 * nodes > MAX_NODES {
            return Err(PerturbationError::QuadratureNoConvergence {
                max_nodes: MAX_NODES,
            });
        }
        nodes *= 2;
        let (params, energies, mismatch) = contour_values(chart, &start, radius, nodes)?;
        let next = moments(&params, &energies, center, order.max(10));
        let emax = energies.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let settled = (0..10).all(|k| {
            let scale = match center {
                SeriesCenter::Infinity => emax * radius.powi(k as i32 + 1),
                SeriesCenter::Origin => emax * radius.powi(-(k as i32 + 1)),
            };
            (next[k] - coeffs[k]).norm() <= 1e-12 * scale
        });
        coeffs = next;
        if settled {
            break (energies, mismatch);
        }
    };
    coeffs.truncate(order);
    let quadrature_constant = energies.iter().sum::<Complex64>() / energies.len() as f64;
    let mut expansion = SeriesExpansion {
        family,
        level,
        center,
        leading_term: leading,
        quadrature_constant,
        coefficients: coeffs,
        contour_radius: radius,
        estimated_radius: f64::NAN,
        nodes,
        start,
        closure_mismatch: mismatch,
    };
    expansion.estimated_radius = radius_estimate(&expansion).unwrap_or(f64::NAN);
    Ok(expansion)
}

/// Root-test estimate of the convergence radius from a least-squares fit of
/// `ln|a_k|` over the top half of the coefficients.
pub fn radius_estimate(expansion: &SeriesExpansion) -> Result<f64> {
    let c = &expansion.coefficients;
    let r = expansion.contour_radius;
    // |a_k| scaled by the contour so that quadrature noise is flat in k.
    let scaled = |k: usize, a: &Complex64| match expansion.center {
        SeriesCenter::Infinity => a.norm() * r.powi(-(k as i32 + 1)),
        SeriesCenter::Origin => a.norm() * r.powi(k as i32 + 1),
    };
    let floor = 1e-12
        * c.iter()
            .enumerate()
            .map(|(k, a)| scaled(k, a))
            .fold(0.0, f64::max);
    let keep = |k: usize, a: &Complex64| a.norm() > 0.0 && scaled(k, a) > floor;
    if c.iter().enumerate().filter(|(k, a)| keep(*k, a)).count() < 10 {
        return Err(PerturbationError::DegenerateCoefficients);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = c
        .iter()
        .enumerate()
        .skip(c.len() / 2)
        .filter(|(k, a)| keep(*k, a))
        .map(|(k, a)| (k as f64, a.norm().ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(PerturbationError::DegenerateCoefficients);
    }
    let slope = ls_slope(&xs, &ys).ok_or(PerturbationError::DegenerateCoefficients)?;
    Ok(match expansion.center {
        SeriesCenter::Infinity => slope.exp(),
        SeriesCenter::Origin => (-slope).exp(),
    })
}

/// Direct value of the expansion's level at `p`, continued from the
/// contour start along the circle and then radially.
pub fn direct_value(expansion: &SeriesExpansion, p: Complex64) -> Result<Complex64> {
    let chart = default_chart(expansion.family);
    let r = expansion.contour_radius;
    let theta0 = expansion.start.param.arg();
    let mut dtheta = (p.arg() - theta0).rem_euclid(2.0 * PI);
    if dtheta > PI {
        dtheta -= 2.0 * PI;
    }
    let steps = ((dtheta.abs() / (2.0 * PI) * 64.0).ceil() as usize).max(1);
    let mut pts: Vec<Complex64> = (0..=steps)
        .map(|j| Complex64::from_polar(r, theta0 + dtheta * j as f64 / steps as f64))
        .collect();
    if (p - *pts.last().unwrap()).norm() > 1e-14 * r {
        pts.push(p);
    }
    if pts.len() < 2 {
        pts.push(p);
    }
    let path = ParamPath::open(pts).map_err(ContinuationError::from)?;
    let track = continue_level(
        chart,
        expansion.start.param,
        expansion.start.internal,
        &path,
        &ContinuationSettings::default(),
    )?;
    Ok(track.last().energy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub point: Complex64,
    pub direct: Complex64,
    /// Relative error of the partial sum with `n` terms, `n = 1..=K`.
    pub errors: Vec<f64>,
    /// Geometric decay ratio fitted over the second half of `errors`.
    pub observed_ratio: Option<f64>,
    /// `radius/|p|` about infinity, `|p|/radius` about the origin.
    pub expected_ratio: f64,
    pub diverging: bool,
}

impl ConvergenceRow {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().unwrap_or(&f64::NAN)
    }
}

/// Partial-sum errors against directly continued values.
pub fn convergence_report(
    expansion: &SeriesExpansion,
    points: &[Complex64],
) -> Result<Vec<ConvergenceRow>> {
    points
        .iter()
        .map(|&p| {
            let direct = direct_value(expansion, p)?;
            let scale = direct.norm().max(1e-300);
            let k = expansion.coefficients.len();
            let errors: Vec<f64> = (1..=k)
                .map(|n| (expansion.partial_sum(p, n) - direct).norm() / scale)
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = errors
                .iter()
                .enumerate()
                .skip(k / 2)
                .filter(|(_, e)| **e > 1e-13)
                .map(|(n, e)| (n as f64, e.ln()))
                .unzip();
            let observed_ratio = if xs.len() >= 3 {
                ls_slope(&xs, &ys).map(f64::exp)
            } else {
                None
            };
            let expected_ratio = match expansion.center {
                SeriesCenter::Infinity => expansion.estimated_radius / p.norm(),
                SeriesCenter::Origin => p.norm() / expansion.estimated_radius,
            };
            let last = *errors.last().unwrap_or(&0.0);
            let mid = errors[k / 2];
            let diverging = observed_ratio.is_some_and(|r| r > 1.0) || (last > mid && last > 1e-10);
            Ok(ConvergenceRow {
                point: p,
                direct,
                errors,
                observed_ratio,
                expected_ratio,
                diverging,
            })
        })
        .collect()
}

/// Coefficients from any pre-sampled circle, for callers that sample the
/// function themselves.
pub fn moments_from_samples(
    values: &[Complex64],
    radius: f64,
    center: SeriesCenter,
    count: usize,
) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let m = match center {
                SeriesCenter::Infinity => k as i32,
                SeriesCenter::Origin => -(k as i32) - 2,
            };
            numerics::trapezoid_moment(values, radius, m)
        })
        .collect()
}
