//! Infinite well of half-width 1 with a central barrier `2gδ(x)`.
//!
//! Odd levels ignore the barrier (`k = lπ`); even levels obey
//! `k cot k = −g`, `E = k²`. Even level `l ≥ 1` starts at `(l−½)π` for
//! `g = 0` and climbs to `lπ` as `g → +∞`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::branchpoints::{g_of_k as g_of_k_unchecked, Family};
use crate::continuation::{
    continue_level, delta_real_momentum, ContinuationError, ContinuationSettings, DeltaEnergy,
    LevelTrack, ParamPath,
};
use crate::perturbation::{self, SeriesCenter, SeriesExpansion};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeltaError {
    #[error("k = {k} is a pole of g(k)")]
    AtPole { k: Complex64 },
    #[error("g must be finite")]
    NonFinite,
    #[error(transparent)]
    Continuation(#[from] ContinuationError),
    #[error(transparent)]
    Perturbation(#[from] perturbation::PerturbationError),
}

pub type Result<T> = std::result::Result<T, DeltaError>;

/// `g = −k cot k`; `k = rπ`, `r ≠ 0`, are poles.
pub fn g_of_k(k: Complex64) -> Result<Complex64> {
    let r = (k.re / PI).round();
    if r != 0.0 && (k - Complex64::new(r * PI, 0.0)).norm() < 1e-12 {
        return Err(DeltaError::AtPole { k });
    }
    Ok(g_of_k_unchecked(k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaLevel {
    pub index: usize,
    pub k: Complex64,
    pub g: Complex64,
    pub energy: Complex64,
}

impl DeltaLevel {
    /// `|k cos k + g sin k|` relative to the size of its terms.
    pub fn scaled_residual(&self) -> f64 {
        let (a, b) = (self.k * self.k.cos(), self.g * self.k.sin());
        (a + b).norm() / (1.0 + a.norm() + b.norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSpectrum {
    pub g: f64,
    pub even: Vec<DeltaLevel>,
    /// `k = lπ`, independent of `g`.
    pub odd: Vec<(usize, f64)>,
}

/// The first `n_levels` even levels at real `g` plus the matching odd ones.
///
/// For `g < −1` the ground level has imaginary `k` and negative energy.
pub fn delta_spectrum(g: f64, n_levels: usize) -> Result<DeltaSpectrum> {
    if !g.is_finite() {
        return Err(DeltaError::NonFinite);
    }
    let even = (1..=n_levels)
        .map(|l| {
            let k = delta_real_momentum(l, g)?;
            Ok(DeltaLevel {
                index: l,
                k,
                g: Complex64::new(g, 0.0),
                energy: k * k,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let odd = (1..=n_levels).map(|l| (l, l as f64 * PI)).collect();
    Ok(DeltaSpectrum { g, even, odd })
}

/// Continues an even level along `path` in the energy chart.
pub fn delta_continue(start: &DeltaLevel, path: &ParamPath) -> Result<LevelTrack> {
    Ok(continue_level(
        &DeltaEnergy,
        start.g,
        start.energy,
        path,
        &ContinuationSettings::default(),
    )?)
}

/// Series of even level `l` about `g = 0` or `g = ∞` with default contours.
pub fn delta_series(level: usize, center: SeriesCenter, order: usize) -> Result<SeriesExpansion> {
    Ok(perturbation::series_coefficients(
        Family::DeltaBarrier,
        level,
        order,
        None,
        center,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_levels() {
        let s = delta_spectrum(0.0, 5).unwrap();
        for lvl in &s.even {
            assert!((lvl.k.re - (lvl.index as f64 - 0.5) * PI).abs() < 1e-13);
        }
        assert_eq!(s.odd[2], (3, 3.0 * PI));
    }

    #[test]
    fn unit_coupling_ground() {
        let s = delta_spectrum(1.0, 1).unwrap();
        assert!((s.even[0].k.re - 2.028_757_838_110_434).abs() < 1e-12);
        assert!(s.even[0].scaled_residual() < 1e-15);
    }

    #[test]
    fn pole_check() {
        assert!(g_of_k(Complex64::new(PI, 0.0)).is_err());
        assert_eq!(
            g_of_k(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        let k = Complex64::new(1.3, 0.7);
        assert!((g_of_k(k).unwrap() - g_of_k(-k).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn negative_coupling_window() {
        let s = delta_spectrum(-3.0, 2).unwrap();
        assert!(s.even[0].energy.re < 0.0);
        assert!(s.even[1].k.re > PI);
    }
}
