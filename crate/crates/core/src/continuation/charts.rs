//! Coordinates in which the energy surfaces are continued.
//!
//! Each chart describes a level by an internal coordinate `w` that is a
//! root of an entire function `G(w, p) = 0`, where `p` is the physical
//! parameter. `p(w)` is then a single-valued map whose critical points are
//! the branch points.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;

use crate::branchpoints::{even_threshold_phase, odd_threshold_phase, Family};
use crate::numerics::bisect;
use crate::quantization::log_branch_of_phase;

use super::ContinuationError;

/// Position of a real level in the census bookkeeping.
///
/// `mirror` marks the `φ → −φ` image of the level (the twin obtained by
/// `λ → −λ` in the even family, or the other sign of `φ` in the odd phase
/// chart).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelId {
    pub index: usize,
    pub mirror: bool,
}

impl LevelId {
    pub fn plain(index: usize) -> Self {
        Self {
            index,
            mirror: false,
        }
    }
}

impl fmt::Display for LevelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mirror {
            write!(f, "{}'", self.index)
        } else {
            write!(f, "{}", self.index)
        }
    }
}

/// A real starting point for a level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub level: usize,
    pub param: Complex64,
    pub internal: Complex64,
}

pub trait Chart: Send + Sync {
    fn family(&self) -> Family;
    fn name(&self) -> &'static str;
    /// `p(w)`.
    fn parameter(&self, w: Complex64) -> Complex64;
    /// `dp/dw`; zero exactly at the branch points.
    fn parameter_derivative(&self, w: Complex64) -> Complex64;
    /// `G(w, p)`.
    fn condition(&self, w: Complex64, p: Complex64) -> Complex64;
    /// `∂G/∂w`.
    fn condition_derivative(&self, w: Complex64, p: Complex64) -> Complex64;
    fn energy(&self, w: Complex64) -> Complex64;
    /// Typical size of the terms of `G`, for relative residuals.
    fn residual_scale(&self, w: Complex64, p: Complex64) -> f64;
    /// Largest predictor step allowed in `w`.
    fn max_step(&self, w: Complex64) -> f64;
    /// Level label of a real solution at real parameter `p`.
    fn identify(&self, p: f64, w: Complex64) -> Option<LevelId>;
    /// A real starting point for `level` at `|p| = magnitude`.
    fn anchor(&self, level: usize, magnitude: f64) -> Result<Anchor, ContinuationError>;
    /// Accumulated `2π` multiples of `ln σ` (phase charts only).
    fn log_branch(&self, _w: Complex64) -> i64 {
        0
    }

    fn scaled_residual(&self, w: Complex64, p: Complex64) -> f64 {
        self.condition(w, p).norm() / (1.0 + self.residual_scale(w, p))
    }
}

fn is_real(w: Complex64) -> bool {
    w.im.abs() <= 1e-8 * (1.0 + w.re.abs())
}

/// `S(u) = sin √u / √u`, entire in `u`.
pub fn sinc_sqrt(u: Complex64) -> Complex64 {
    if u.norm() < 0.25 {
        // Σ (−u)^n / (2n+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for n in 1..14 {
            term = -term * u / ((2 * n) as f64 * (2 * n + 1) as f64);
            acc += term;
        }
        return acc;
    }
    let s = u.sqrt();
    s.sin() / s
}

/// `dS/du = (s cos s − sin s) / (2 s³)`.
pub fn sinc_sqrt_derivative(u: Complex64) -> Complex64 {
    if u.norm() < 0.25 {
        // Σ n (−1)^n u^{n−1} / (2n+1)!
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 6.0;
        for n in 1..14 {
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            acc += pow * (sign * n as f64 / fact);
            pow *= u;
            fact *= ((2 * n + 2) * (2 * n + 3)) as f64;
        }
        return acc;
    }
    let s = u.sqrt();
    (s * s.cos() - s.sin()) / (s * s * s * 2.0)
}

/// `C(u) = cos √u`.
pub fn cos_sqrt(u: Complex64) -> Complex64 {
    u.sqrt().cos()
}

/// Even well in the phase `φ`: `λ = φ / cos φ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvenPhase;

/// Odd well in the phase `φ`: `λ = φ / sin φ`. `λ = 1` is a square-root
/// point of this chart that leaves the energy untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct OddPhase;

/// Odd well in the energy `u = φ²`: `λ = 1 / S(u)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OddEnergy;

/// Delta barrier in the energy: `cos √E + g S(E) = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeltaEnergy;

/// Delta barrier in the momentum: `k cos k + g sin k = 0`. `g = −1`
/// (`k = 0`) is a square-root point of this chart only.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeltaMomentum;

fn real_root(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    level: usize,
    magnitude: f64,
) -> Result<f64, ContinuationError> {
    bisect(f, a, b).map_err(|_| ContinuationError::AnchorUnavailable { level, magnitude })
}

const EDGE: f64 = 1e-12;

/// `(index, mirror)` of a real even-family phase.
fn identify_even(phi: f64) -> Option<LevelId> {
    if phi.abs() < FRAC_PI_2 {
        return Some(LevelId::plain(1));
    }
    let (psi, mirror) = if phi > 0.0 {
        (-phi, true)
    } else {
        (phi, false)
    };
    let j = (-psi / PI).round() as usize;
    let threshold = even_threshold_phase(j + 1).ok()?;
    let index = if -psi < threshold { 2 * j } else { 2 * j + 1 };
    Some(LevelId { index, mirror })
}

fn identify_odd(phi: f64) -> Option<LevelId> {
    let (a, mirror) = (phi.abs(), phi < 0.0);
    if a < PI {
        return Some(LevelId { index: 2, mirror });
    }
    let j = (a / PI).floor() as usize;
    let threshold = odd_threshold_phase(j).ok()?;
    let index = if a < threshold { 2 * j + 1 } else { 2 * j + 2 };
    Some(LevelId { index, mirror })
}

fn even_anchor(level: usize, magnitude: f64) -> Result<Anchor, ContinuationError> {
    let unavailable = ContinuationError::AnchorUnavailable { level, magnitude };
    if level == 0 || !magnitude.is_finite() || magnitude <= 0.0 {
        return Err(unavailable);
    }
    if level == 1 {
        let phi = real_root(
            |p| magnitude * p.cos() - p,
            0.0,
            FRAC_PI_2,
            level,
            magnitude,
        )?;
        return Ok(Anchor {
            level,
            param: Complex64::new(magnitude, 0.0),
            internal: Complex64::new(phi, 0.0),
        });
    }
    let j = level / 2;
    let lam = if j % 2 == 1 { magnitude } else { -magnitude };
    let t = even_threshold_phase(j + 1).map_err(|_| unavailable.clone())?;
    if magnitude <= (t / t.cos()).abs() {
        return Err(unavailable);
    }
    let h = |p: f64| lam * p.cos() - p;
    let (lo, hi) = if level.is_multiple_of(2) {
        (-t, -(j as f64 - 0.5) * PI - EDGE)
    } else {
        (-(j as f64 + 0.5) * PI + EDGE, -t)
    };
    let phi = real_root(h, lo, hi, level, magnitude)?;
    Ok(Anchor {
        level,
        param: Complex64::new(lam, 0.0),
        internal: Complex64::new(phi, 0.0),
    })
}

fn odd_anchor_phase(level: usize, magnitude: f64) -> Result<(f64, f64), ContinuationError> {
    let unavailable = ContinuationError::AnchorUnavailable { level, magnitude };
    if level < 2 || !magnitude.is_finite() || magnitude <= 1.0 {
        return Err(unavailable);
    }
    if level == 2 {
        let phi = real_root(
            |p| magnitude * p.sin() - p,
            EDGE.max(1e-9),
            PI - EDGE,
            level,
            magnitude,
        )?;
        return Ok((magnitude, phi));
    }
    let j = (level - 1) / 2;
    let lam = if j.is_multiple_of(2) {
        magnitude
    } else {
        -magnitude
    };
    let t = odd_threshold_phase(j).map_err(|_| unavailable.clone())?;
    if magnitude <= (t / t.sin()).abs() {
        return Err(unavailable);
    }
    let h = |p: f64| lam * p.sin() - p;
    let (lo, hi) = if level % 2 == 1 {
        (j as f64 * PI + EDGE, t)
    } else {
        (t, (j as f64 + 1.0) * PI - EDGE)
    };
    let phi = real_root(h, lo, hi, level, magnitude)?;
    Ok((lam, phi))
}

impl Chart for EvenPhase {
    fn family(&self) -> Family {
        Family::EvenWell
    }
    fn name(&self) -> &'static str {
        "even-phase"
    }
    fn parameter(&self, w: Complex64) -> Complex64 {
        w / w.cos()
    }
    fn parameter_derivative(&self, w: Complex64) -> Complex64 {
        let c = w.cos();
        (c + w * w.sin()) / (c * c)
    }
    fn condition(&self, w: Complex64, p: Complex64) -> Complex64 {
        p * w.cos() - w
    }
    fn condition_derivative(&self, w: Complex64, p: Complex64) -> Complex64 {
        -p * w.sin() - 1.0
    }
    fn energy(&self, w: Complex64) -> Complex64 {
        w * w
    }
    fn residual_scale(&self, w: Complex64, _p: Complex64) -> f64 {
        w.norm()
    }
    fn max_step(&self, _w: Complex64) -> f64 {
        FRAC_PI_4
    }
    fn identify(&self, _p: f64, w: Complex64) -> Option<LevelId> {
        is_real(w).then(|| identify_even(w.re)).flatten()
    }
    fn anchor(&self, level: usize, magnitude: f64) -> Result<Anchor, ContinuationError> {
        even_anchor(level, magnitude)
    }
    fn log_branch(&self, w: Complex64) -> i64 {
        log_branch_of_phase(w)
    }
}

impl Chart for OddPhase {
    fn family(&self) -> Family {
        Family::OddWell
    }
    fn name(&self) -> &'static str {
        "odd-phase"
    }
    fn parameter(&self, w: Complex64) -> Complex64 {
        if w.norm() < 1e-6 {
            let w2 = w * w;
            return Complex64::new(1.0, 0.0) + w2 / 6.0 + w2 * w2 * (7.0 / 360.0);
        }
        w / w.sin()
    }
    fn parameter_derivative(&self, w: Complex64) -> Complex64 {
        if w.norm() < 1e-6 {
            return w / 3.0 + w * w * w * (7.0 / 90.0);
        }
        let s = w.sin();
        (s - w * w.cos()) / (s * s)
    }
    fn condition(&self, w: Complex64, p: Complex64) -> Complex64 {
        p * w.sin() - w
    }
    fn condition_derivative(&self, w: Complex64, p: Complex64) -> Complex64 {
        p * w.cos() - 1.0
    }
    fn energy(&self, w: Complex64) -> Complex64 {
        w * w
    }
    fn residual_scale(&self, w: Complex64, _p: Complex64) -> f64 {
        w.norm()
    }
    fn max_step(&self, _w: Complex64) -> f64 {
        FRAC_PI_4
    }
    fn identify(&self, _p: f64, w: Complex64) -> Option<LevelId> {
        if w.re.abs() <= 1e-8 * (1.0 + w.im.abs()) && w.im != 0.0 {
            // Imaginary phase: level 2 below λ = 1.
            return Some(LevelId {
                index: 2,
                mirror: w.im < 0.0,
            });
        }
        is_real(w).then(|| identify_odd(w.re)).flatten()
    }
    fn anchor(&self, level: usize, magnitude: f64) -> Result<Anchor, ContinuationError> {
        let (lam, phi) = odd_anchor_phase(level, magnitude)?;
        Ok(Anchor {
            level,
            param: Complex64::new(lam, 0.0),
            internal: Complex64::new(phi, 0.0),
        })
    }
    fn log_branch(&self, w: Complex64) -> i64 {
        log_branch_of_phase(w)
    }
}

impl Chart for OddEnergy {
    fn family(&self) -> Family {
        Family::OddWell
    }
    fn name(&self) -> &'static str {
        "odd-energy"
    }
    fn parameter(&self, w: Complex64) -> Complex64 {
        sinc_sqrt(w).inv()
    }
    fn parameter_derivative(&self, w: Complex64) -> Complex64 {
        let s = sinc_sqrt(w);
        -sinc_sqrt_derivative(w) / (s * s)
    }
    fn condition(&self, w: Complex64, p: Complex64) -> Complex64 {
        p * sinc_sqrt(w) - 1.0
    }
    fn condition_derivative(&self, w: Complex64, p: Complex64) -> Complex64 {
        p * sinc_sqrt_derivative(w)
    }
    fn energy(&self, w: Complex64) -> Complex64 {
        w
    }
    fn residual_scale(&self, w: Complex64, p: Complex64) -> f64 {
        (p * sinc_sqrt(w)).norm()
    }
    fn max_step(&self, w: Complex64) -> f64 {
        0.5 * (1.0 + w.norm().sqrt())
    }
    fn identify(&self, _p: f64, w: Complex64) -> Option<LevelId> {
        if !is_real(w) {
            return None;
        }
        if w.re < PI * PI {
            return Some(LevelId::plain(2));
        }
        identify_odd(w.re.sqrt()).map(|id| LevelId::plain(id.index))
    }
    fn anchor(&self, level: usize, magnitude: f64) -> Result<Anchor, ContinuationError> {
        let (lam, phi) = odd_anchor_phase(level, magnitude)?;
        Ok(Anchor {
            level,
            param: Complex64::new(lam, 0.0),
            internal: Complex64::new(phi * phi, 0.0),
        })
    }
}

/// Real momentum of delta level `l` at real `g`, or the imaginary
/// momentum `κ` (returned negative-signed in `.1`) for the ground level
/// below `g = −1`.
pub(crate) fn delta_real_momentum(level: usize, g: f64) -> Result<Complex64, ContinuationError> {
    let unavailable = ContinuationError::AnchorUnavailable {
        level,
        magnitude: g,
    };
    if level == 0 || !g.is_finite() {
        return Err(unavailable);
    }
    let f = |k: f64| k * k.cos() + g * k.sin();
    if level == 1 && g <= -1.0 {
        if g == -1.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // κ coth κ = −g.
        let h = |kappa: f64| kappa * kappa.cosh() + g * kappa.sinh();
        let hi = 2.0 * (-g) + 2.0;
        let kappa = real_root(h, 1e-9, hi, level, g)?;
        return Ok(Complex64::new(0.0, kappa));
    }
    let (lo, hi) = if level == 1 {
        (1e-9, PI - EDGE)
    } else {
        ((level - 1) as f64 * PI + EDGE, level as f64 * PI - EDGE)
    };
    let k = real_root(f, lo, hi, level, g)?;
    Ok(Complex64::new(k, 0.0))
}

fn identify_delta_energy(e: f64) -> LevelId {
    if e < 0.0 {
        return LevelId::plain(1);
    }
    LevelId::plain((e.sqrt() / PI).floor() as usize + 1)
}

impl Chart for DeltaEnergy {
    fn family(&self) -> Family {
        Family::DeltaBarrier
    }
    fn name(&self) -> &'static str {
        "delta-energy"
    }
    fn parameter(&self, w: Complex64) -> Complex64 {
        -cos_sqrt(w) / sinc_sqrt(w)
    }
    fn parameter_derivative(&self, w: Complex64) -> Complex64 {
        let s = sinc_sqrt(w);
        (s * s * 0.5 + cos_sqrt(w) * sinc_sqrt_derivative(w)) / (s * s)
    }
    fn condition(&self, w: Complex64, p: Complex64) -> Complex64 {
        cos_sqrt(w) + p * sinc_sqrt(w)
    }
    fn condition_derivative(&self, w: Complex64, p: Complex64) -> Complex64 {
        -sinc_sqrt(w) * 0.5 + p * sinc_sqrt_derivative(w)
    }
    fn energy(&self, w: Complex64) -> Complex64 {
        w
    }
    fn residual_scale(&self, w: Complex64, p: Complex64) -> f64 {
        cos_sqrt(w).norm() + (p * sinc_sqrt(w)).norm()
    }
    fn max_step(&self, w: Complex64) -> f64 {
        0.5 * (1.0 + w.norm().sqrt())
    }
    fn identify(&self, _p: f64, w: Complex64) -> Option<LevelId> {
        is_real(w).then(|| identify_delta_energy(w.re))
    }
    fn anchor(&self, level: usize, magnitude: f64) -> Result<Anchor, ContinuationError> {
        let k = delta_real_momentum(level, magnitude)?;
        Ok(Anchor {
            level,
            param: Complex64::new(magnitude, 0.0),
            internal: k * k,
        })
    }
}

impl Chart for DeltaMomentum {
    fn family(&self) -> Family {
        Family::DeltaBarrier
    }
    fn name(&self) -> &'static str {
        "delta-momentum"
    }
    fn parameter(&self, w: Complex64) -> Complex64 {
        crate::branchpoints::g_of_k(w)
    }
    fn parameter_derivative(&self, w: Complex64) -> Complex64 {
        if w.norm() < 1e-4 {
            return w * (2.0 / 3.0) + w * w * w * (4.0 / 45.0);
        }
        let s = w.sin();
        (w * 2.0 - (w * 2.0).sin()) / (s * s * 2.0)
    }
    fn condition(&self, w: Complex64, p: Complex64) -> Complex64 {
        w * w.cos() + p * w.sin()
    }
    fn condition_derivative(&self, w: Complex64, p: Complex64) -> Complex64 {
        w.cos() - w * w.sin() + p * w.cos()
    }
    fn energy(&self, w: Complex64) -> Complex64 {
        w * w
    }
    fn residual_scale(&self, w: Complex64, p: Complex64) -> f64 {
        (w * w.cos()).norm() + (p * w.sin()).norm()
    }
    fn max_step(&self, _w: Complex64) -> f64 {
        FRAC_PI_4
    }
    fn identify(&self, _p: f64, w: Complex64) -> Option<LevelId> {
        let e = w * w;
        is_real(e).then(|| LevelId {
            mirror: w.re < 0.0 || (w.re == 0.0 && w.im < 0.0),
            ..identify_delta_energy(e.re)
        })
    }
    fn anchor(&self, level: usize, magnitude: f64) -> Result<Anchor, ContinuationError> {
        let k = delta_real_momentum(level, magnitude)?;
        Ok(Anchor {
            level,
            param: Complex64::new(magnitude, 0.0),
            internal: k,
        })
    }
}

/// The chart used by default for each family.
pub fn default_chart(family: Family) -> &'static dyn Chart {
    match family {
        Family::EvenWell => &EvenPhase,
        Family::OddWell => &OddEnergy,
        Family::DeltaBarrier => &DeltaEnergy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn series_and_closed_forms_agree() {
        for u in [c(0.2, 0.1), c(-0.24, 0.0), c(0.0, 0.249)] {
            let s = u.sqrt();
            assert!((sinc_sqrt(u) - s.sin() / s).norm() < 1e-15);
            let t = (s * s.cos() - s.sin()) / (s * s * s * 2.0);
            assert!((sinc_sqrt_derivative(u) - t).norm() < 1e-11);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let charts: [&dyn Chart; 5] = [
            &EvenPhase,
            &OddPhase,
            &OddEnergy,
            &DeltaEnergy,
            &DeltaMomentum,
        ];
        let h = 1e-6;
        for chart in charts {
            for w in [c(1.3, 0.4), c(7.0, -0.8), c(20.0, 3.0)] {
                let fd = (chart.parameter(w + h) - chart.parameter(w - h)) / (2.0 * h);
                let d = chart.parameter_derivative(w);
                assert!(
                    (fd - d).norm() <= 1e-6 * (1.0 + d.norm()),
                    "{}: {fd} vs {d}",
                    chart.name()
                );
                let p = c(2.0, 0.5);
                let fd = (chart.condition(w + h, p) - chart.condition(w - h, p)) / (2.0 * h);
                let d = chart.condition_derivative(w, p);
                assert!(
                    (fd - d).norm() <= 1e-6 * (1.0 + d.norm()),
                    "{}: {fd} vs {d}",
                    chart.name()
                );
            }
        }
    }

    #[test]
    fn anchors_identify_as_themselves() {
        for level in 1..=9 {
            let a = EvenPhase.anchor(level, 20.0).unwrap();
            assert!(EvenPhase.scaled_residual(a.internal, a.param) < 1e-13);
            assert_eq!(
                EvenPhase.identify(a.param.re, a.internal),
                Some(LevelId::plain(level))
            );
        }
        for level in 2..=9 {
            for chart in [&OddEnergy as &dyn Chart, &OddPhase] {
                let a = chart.anchor(level, 20.0).unwrap();
                assert!(chart.scaled_residual(a.internal, a.param) < 1e-13);
                assert_eq!(
                    chart.identify(a.param.re, a.internal),
                    Some(LevelId::plain(level)),
                    "{}",
                    chart.name()
                );
            }
        }
        for level in 1..=6 {
            let a = DeltaEnergy.anchor(level, 3.0).unwrap();
            assert!(DeltaEnergy.scaled_residual(a.internal, a.param) < 1e-13);
            assert_eq!(
                DeltaEnergy.identify(3.0, a.internal),
                Some(LevelId::plain(level))
            );
        }
    }

    #[test]
    fn even_anchor_needs_open_pair() {
        // Level 14 needs |λ₈| ≈ 21.97 > 20.
        assert!(EvenPhase.anchor(14, 20.0).is_err());
        assert!(EvenPhase.anchor(14, 30.0).is_ok());
    }

    #[test]
    fn delta_ground_below_window() {
        let k = delta_real_momentum(1, -2.0).unwrap();
        assert_eq!(k.re, 0.0);
        let kappa = k.im;
        assert!((kappa / kappa.tanh() - 2.0).abs() < 1e-12);
    }
}
