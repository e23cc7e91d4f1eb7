//! Quantization conditions of the finite square well.
//!
//! With the well strength `λ` and `φ = λz`, even states obey `λ cos φ = φ`
//! and odd states `λ sin φ = φ`; the energy in units of the well scale is
//! `E = φ²`. In the uniformizing variable `σ = e^{iφ}` both strength maps
//! are single valued up to the logarithm's branch.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{self, is_finite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantizationError {
    #[error("sigma = {sigma} is a pole of the strength map")]
    PoleHit { sigma: Complex64 },
    #[error("lambda = {lambda} sits on a level threshold (multiple of pi/2)")]
    TangencyDegenerate { lambda: f64 },
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, QuantizationError>;

const POLE_RADIUS: f64 = 1e-12;
const TANGENCY_GAP: f64 = 1e-9;

/// One real bound level at a fixed positive `λ`.
///
/// `sign` records which branch of the condition the level obeys:
/// `λ·trig(φ) = sign·φ`, so the analytic family value is reached at
/// `sign·λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellLevel {
    pub index: usize,
    pub parity: Parity,
    pub phi: f64,
    pub energy: f64,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub lambda: f64,
    pub levels: Vec<WellLevel>,
}

/// Strength as a function of `σ` on log branch `b` (`ln σ + 2πib`).
pub fn lambda_of_sigma(parity: Parity, sigma: Complex64, log_branch: i64) -> Result<Complex64> {
    if !is_finite(sigma) {
        return Err(QuantizationError::NonFinite);
    }
    if sigma.norm() < POLE_RADIUS {
        return Err(QuantizationError::PoleHit { sigma });
    }
    let log = sigma.ln() + Complex64::new(0.0, 2.0 * PI * log_branch as f64);
    let i = Complex64::i();
    match parity {
        Parity::Even => {
            if (sigma - i).norm() < POLE_RADIUS || (sigma + i).norm() < POLE_RADIUS {
                return Err(QuantizationError::PoleHit { sigma });
            }
            Ok(-i * 2.0 * sigma * log / (sigma * sigma + 1.0))
        }
        Parity::Odd => {
            let near_one = (sigma - 1.0).norm() < POLE_RADIUS;
            if (sigma + 1.0).norm() < POLE_RADIUS || (near_one && log_branch != 0) {
                return Err(QuantizationError::PoleHit { sigma });
            }
            if near_one {
                // Removable point of the principal branch.
                return Ok(Complex64::new(1.0, 0.0));
            }
            Ok(sigma * 2.0 * log / (sigma * sigma - 1.0))
        }
    }
}

/// Strength as a function of the phase: `φ/cos φ` or `φ/sin φ`.
pub fn lambda_of_phase(parity: Parity, phi: Complex64) -> Result<Complex64> {
    if !is_finite(phi) {
        return Err(QuantizationError::NonFinite);
    }
    let t = match parity {
        Parity::Even => phi.cos(),
        Parity::Odd => {
            if phi.norm() < 1e-8 {
                return Ok(Complex64::new(1.0, 0.0) + phi * phi / 6.0);
            }
            phi.sin()
        }
    };
    if t.norm() < POLE_RADIUS {
        return Err(QuantizationError::PoleHit {
            sigma: (Complex64::i() * phi).exp(),
        });
    }
    Ok(phi / t)
}

/// `z = φ/λ` expressed through `σ`: `cos φ` (even) or `sin φ` (odd).
pub fn z_of_sigma(parity: Parity, sigma: Complex64) -> Complex64 {
    let inv = sigma.inv();
    match parity {
        Parity::Even => (sigma + inv) * 0.5,
        Parity::Odd => (sigma - inv) / Complex64::new(0.0, 2.0),
    }
}

pub fn energy_of(lambda: Complex64, z: Complex64) -> Complex64 {
    lambda * lambda * z * z
}

/// Residual of the analytic condition: `λ cos φ − φ` or `λ sin φ − φ`.
pub fn condition_residual(parity: Parity, phi: Complex64, lambda: Complex64) -> Complex64 {
    match parity {
        Parity::Even => lambda * phi.cos() - phi,
        Parity::Odd => lambda * phi.sin() - phi,
    }
}

/// Numerator of `dλ/dσ` with the logarithm `L = ln σ + 2πib`:
/// `L(1 − σ²) + σ² + 1` (even) and `σ² − 1 − L(σ² + 1)` (odd).
///
/// On the unit circle these reduce to `2σ(φ sin φ + cos φ)` and
/// `2iσ(sin φ − φ cos φ)`.
pub fn stationary_residual(parity: Parity, sigma: Complex64, log_branch: i64) -> Complex64 {
    let log = sigma.ln() + Complex64::new(0.0, 2.0 * PI * log_branch as f64);
    let s2 = sigma * sigma;
    match parity {
        Parity::Even => log * (-s2 + 1.0) + s2 + 1.0,
        Parity::Odd => s2 - 1.0 - log * (s2 + 1.0),
    }
}

/// The log branch that makes `ln σ + 2πib = iφ` for real-part-carrying `φ`.
pub fn log_branch_of_phase(phi: Complex64) -> i64 {
    let sigma = (Complex64::i() * phi).exp();
    ((phi.re - sigma.arg()) / (2.0 * PI)).round() as i64
}

/// Number of real bound levels at `λ > 0`.
pub fn level_count(lambda: f64) -> usize {
    (2.0 * lambda / PI).floor() as usize + 1
}

/// Real spectrum at `λ > 0`: arc `m` covers `φ ∈ ((m−1)π/2, mπ/2)`, uses
/// `|cos φ|` for odd `m` (even parity) and `|sin φ|` for even `m`, and
/// holds exactly one level.
pub fn real_spectrum(lambda: f64) -> Result<SpectrumTable> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(QuantizationError::InvalidLambda(lambda));
    }
    let q = lambda / FRAC_PI_2;
    if q >= 1.0 - 1e-12 && (q - q.round()).abs() * FRAC_PI_2 < TANGENCY_GAP {
        return Err(QuantizationError::TangencyDegenerate { lambda });
    }
    let count = level_count(lambda);
    let mut levels = Vec::with_capacity(count);
    for m in 1..=count {
        let parity = if m % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        };
        let sign = if ((m - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let trig = move |phi: f64| match parity {
            Parity::Even => phi.cos(),
            Parity::Odd => phi.sin(),
        };
        let h = |phi: f64| lambda * trig(phi) - sign * phi;
        let a = (m - 1) as f64 * FRAC_PI_2;
        let b = m as f64 * FRAC_PI_2;
        let mut phi = numerics::bisect(h, a, b)?;
        // One Newton touch-up; bisection already sits at the rounding floor.
        let dh = match parity {
            Parity::Even => -lambda * phi.sin() - sign,
            Parity::Odd => lambda * phi.cos() - sign,
        };
        let step = h(phi) / dh;
        if step.is_finite() && step.abs() < 1e-10 && h(phi - step).abs() < h(phi).abs() {
            phi -= step;
        }
        levels.push(WellLevel {
            index: m,
            parity,
            phi,
            energy: phi * phi,
            sign,
        });
    }
    Ok(SpectrumTable { lambda, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectrum_at_two() {
        let t = real_spectrum(2.0).unwrap();
        assert_eq!(t.levels.len(), 2);
        assert_eq!(t.levels[0].parity, Parity::Even);
        assert_eq!(t.levels[1].parity, Parity::Odd);
        assert_abs_diff_eq!(t.levels[0].phi, 1.0298665293222589, epsilon = 1e-12);
        assert_abs_diff_eq!(t.levels[1].phi, 1.895_494_267_033_981, epsilon = 1e-12);
    }

    #[test]
    fn count_follows_floor_rule() {
        for &l in &[0.3, 1.6, 3.0, 10.0, 31.4] {
            assert_eq!(real_spectrum(l).unwrap().levels.len(), level_count(l));
        }
        assert_eq!(level_count(10.0), 7);
    }

    #[test]
    fn tangency_is_rejected() {
        assert!(matches!(
            real_spectrum(PI),
            Err(QuantizationError::TangencyDegenerate { .. })
        ));
        assert!(real_spectrum(PI + 1e-6).is_ok());
    }

    #[test]
    fn sigma_and_phase_maps_agree() {
        let phi = Complex64::new(-4.2, 0.3);
        let sigma = (Complex64::i() * phi).exp();
        let b = log_branch_of_phase(phi);
        for parity in [Parity::Even, Parity::Odd] {
            let a = lambda_of_sigma(parity, sigma, b).unwrap();
            let p = lambda_of_phase(parity, phi).unwrap();
            assert!((a - p).norm() < 1e-12, "{parity:?}: {a} vs {p}");
        }
    }

    #[test]
    fn poles_are_reported() {
        assert!(lambda_of_sigma(Parity::Even, Complex64::i(), 0).is_err());
        assert!(lambda_of_sigma(Parity::Odd, Complex64::new(-1.0, 0.0), 0).is_err());
        assert!(lambda_of_sigma(Parity::Odd, Complex64::new(1.0, 0.0), 1).is_err());
        let one = lambda_of_sigma(Parity::Odd, Complex64::new(1.0, 0.0), 0).unwrap();
        assert_abs_diff_eq!(one.re, 1.0);
    }

    #[test]
    fn z_matches_trig() {
        let phi = Complex64::new(0.7, -0.2);
        let sigma = (Complex64::i() * phi).exp();
        assert!((z_of_sigma(Parity::Even, sigma) - phi.cos()).norm() < 1e-14);
        assert!((z_of_sigma(Parity::Odd, sigma) - phi.sin()).norm() < 1e-14);
    }
}
