//! Scattering amplitudes of the square well and the k-plane poles.
//!
//! Energies here are shifted by `−λ²`: outside the well the momentum is
//! `k`, inside it is `k' = (k² + λ²)^{1/2}`. Bound levels with phase `φ`
//! sit at `k' = φ`.
//!
//! Even levels zero `D₊(k) = k cos k' − i k' sin k'` and odd levels zero
//! `D₋(k) = k' cos k' − i k sin k'`. On the even condition
//! `λ cos φ = φ` that gives `k = iλ sin φ`; on the odd condition
//! `λ sin φ = φ`, `k' cos k' = i k sin k'` gives `k = −iλ cos φ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::continuation::{EvenPhase, LevelId, OddPhase};
use crate::numerics::{self, is_finite, Analytic, Rectangle, RootSettings};
use crate::quantization::{condition_residual, Parity, WellLevel};
use crate::Chart;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("k = {k} is within 1e-12 of a pole")]
    AtPole { k: Complex64 },
    #[error("k = 0 is excluded")]
    OriginK,
    #[error("(phi, lambda) violates the quantization condition (residual {residual:e})")]
    ConditionViolated { residual: f64 },
    #[error("sweep needs a positive increasing lambda range and at least {min} samples")]
    InvalidSweep { min: usize },
    #[error("root count changed along the sweep at lambda = {lambda}: {found} vs {expected}")]
    LostPole {
        lambda: f64,
        found: usize,
        expected: usize,
    },
    #[error("non-finite input")]
    NonFinite,
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, ScatteringError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringPoint {
    pub k: Complex64,
    pub kprime: Complex64,
    pub t: Complex64,
    pub r: Complex64,
}

impl ScatteringPoint {
    /// `| |T|² + |R|² − 1 |`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.t.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleClass {
    BoundState,
    Pseudoenergy,
}

impl PoleClass {
    pub fn name(self) -> &'static str {
        match self {
            PoleClass::BoundState => "bound",
            PoleClass::Pseudoenergy => "pseudo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleRecord {
    pub k: Complex64,
    pub parity: Parity,
    /// Level label, 0 when the pole is not a real level.
    pub level_index: usize,
    pub classification: PoleClass,
}

const POLE_GAP: f64 = 1e-12;
const AXIS_TOL: f64 = 1e-9;

pub fn kprime(k: Complex64, lambda: Complex64) -> Complex64 {
    (k * k + lambda * lambda).sqrt()
}

/// The parity factor of the amplitude denominator at `k`.
pub fn parity_denominator(parity: Parity, k: Complex64, lambda: Complex64) -> Complex64 {
    let kp = kprime(k, lambda);
    let i = Complex64::i();
    match parity {
        Parity::Even => k * kp.cos() - i * kp * kp.sin(),
        Parity::Odd => kp * kp.cos() - i * k * kp.sin(),
    }
}

fn check_k(k: Complex64, lambda: Complex64) -> Result<()> {
    if !is_finite(k) || !is_finite(lambda) {
        return Err(ScatteringError::NonFinite);
    }
    if k.norm() < POLE_GAP {
        return Err(ScatteringError::OriginK);
    }
    Ok(())
}

/// Full transmission and reflection amplitudes.
pub fn coefficients(k: Complex64, lambda: Complex64) -> Result<ScatteringPoint> {
    check_k(k, lambda)?;
    let kp = kprime(k, lambda);
    let de = parity_denominator(Parity::Even, k, lambda);
    let dodd = parity_denominator(Parity::Odd, k, lambda);
    if de.norm() < POLE_GAP || dodd.norm() < POLE_GAP {
        return Err(ScatteringError::AtPole { k });
    }
    let i = Complex64::i();
    let t = k * kp * (-i * k * 2.0).exp() / (de * dodd);
    // sin 2k'/k' stays finite as k' → 0.
    let sin2_over = if kp.norm() < 1e-8 {
        Complex64::new(2.0, 0.0)
    } else {
        (kp * 2.0).sin() / kp
    };
    let r = i * lambda * lambda * sin2_over / (k * 2.0) * t;
    Ok(ScatteringPoint {
        k,
        kprime: kp,
        t,
        r,
    })
}

/// Parity-resolved pair `(T, R)`: even `T = k/D₊`, `R = iλ sin k'/D₊`;
/// odd `T = k/D₋`, `R = iλ cos k'/D₋`. Each pair is unitary on its own for
/// real `k`.
pub fn parity_coefficients(
    parity: Parity,
    k: Complex64,
    lambda: Complex64,
) -> Result<(Complex64, Complex64)> {
    check_k(k, lambda)?;
    let kp = kprime(k, lambda);
    let d = parity_denominator(parity, k, lambda);
    if d.norm() < POLE_GAP {
        return Err(ScatteringError::AtPole { k });
    }
    let i = Complex64::i();
    let t = k / d;
    let r = match parity {
        Parity::Even => i * lambda * kp.sin() / d,
        Parity::Odd => i * lambda * kp.cos() / d,
    };
    Ok((t, r))
}

pub fn classify(k: Complex64) -> PoleClass {
    if k.re.abs() <= AXIS_TOL && k.im > 0.0 {
        PoleClass::BoundState
    } else {
        PoleClass::Pseudoenergy
    }
}

fn k_of_phi(parity: Parity, phi: Complex64, lambda: Complex64) -> Complex64 {
    let i = Complex64::i();
    match parity {
        Parity::Even => i * lambda * phi.sin(),
        Parity::Odd => -i * lambda * phi.cos(),
    }
}

fn identify(parity: Parity, phi: Complex64, lambda: Complex64) -> usize {
    if lambda.im.abs() > 1e-12 {
        return 0;
    }
    let id: Option<LevelId> = match parity {
        Parity::Even => EvenPhase.identify(lambda.re, phi),
        Parity::Odd => OddPhase.identify(lambda.re, phi),
    };
    id.map_or(0, |id| id.index)
}

/// The pole of the parity's amplitude belonging to the solution
/// `(φ, λ)` of `λ cos φ = φ` (even) or `λ sin φ = φ` (odd).
pub fn pole_from_phi(parity: Parity, phi: Complex64, lambda: Complex64) -> Result<PoleRecord> {
    if !is_finite(phi) || !is_finite(lambda) {
        return Err(ScatteringError::NonFinite);
    }
    let residual = condition_residual(parity, phi, lambda).norm() / (1.0 + phi.norm());
    if residual > 1e-10 {
        return Err(ScatteringError::ConditionViolated { residual });
    }
    let k = k_of_phi(parity, phi, lambda);
    Ok(PoleRecord {
        k,
        parity,
        level_index: identify(parity, phi, lambda),
        classification: classify(k),
    })
}

/// The pole of a physical level at `λ > 0`. Levels on the `−φ` branch of
/// the condition are the analytic family at `−λ`.
pub fn pole_from_level(level: &WellLevel, lambda: f64) -> Result<PoleRecord> {
    let phi = Complex64::new(level.phi, 0.0);
    let lam = Complex64::new(level.sign * lambda, 0.0);
    let mut rec = pole_from_phi(level.parity, phi, lam)?;
    rec.level_index = level.index;
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSample {
    pub lambda: f64,
    pub phi: Complex64,
    pub k: Complex64,
    pub class: PoleClass,
}

/// Trajectory of one pole over a real `λ` sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTrack {
    pub parity: Parity,
    /// Phase strip the pole lives in (0 is the ground strip).
    pub strip: usize,
    /// Level label at the end of the sweep (0 if still complex there).
    pub level_index: usize,
    pub samples: Vec<PoleSample>,
}

/// Minimum number of `λ` samples in a sweep.
pub const MIN_SWEEP_SAMPLES: usize = 100;

/// Phase rectangle holding strip `j` of the primary group.
///
/// Even: `j = 0` is `|Re φ| < π/2`, `j ≥ 1` is `Re φ ∈ (−(j+½)π, −(j−½)π)`.
/// Odd: `j ≥ 1` is `Re φ ∈ (jπ, (j+1)π)`.
pub fn strip_rectangle(parity: Parity, strip: usize) -> Result<Rectangle> {
    const MARGIN: f64 = 0.05;
    const HEIGHT: f64 = 3.0;
    let j = strip as f64;
    let re = match (parity, strip) {
        (Parity::Even, 0) => (-0.5 * PI + MARGIN, 0.5 * PI - MARGIN),
        (Parity::Even, _) => (-(j + 0.5) * PI + MARGIN, -(j - 0.5) * PI - MARGIN),
        (Parity::Odd, 0) => (MARGIN, PI - MARGIN),
        (Parity::Odd, _) => (j * PI + MARGIN, (j + 1.0) * PI - MARGIN),
    };
    Ok(Rectangle::from_bounds(re, (-HEIGHT, HEIGHT + 0.0137))?)
}

/// Roots of the parity condition in a phase strip at real `λ`.
pub fn strip_roots(
    parity: Parity,
    strip: usize,
    lambda: f64,
    seeds: &[Complex64],
) -> Result<numerics::RootList> {
    let rect = strip_rectangle(parity, strip)?;
    let lam = Complex64::new(lambda, 0.0);
    let roots = match parity {
        Parity::Even => {
            let f = Analytic::new(
                move |p: Complex64| lam * p.cos() - p,
                move |p: Complex64| -lam * p.sin() - 1.0,
            );
            numerics::grid_seed_with(&f, &rect, 32, seeds, &RootSettings::default())?
        }
        Parity::Odd => {
            let f = Analytic::new(
                move |p: Complex64| lam * p.sin() - p,
                move |p: Complex64| lam * p.cos() - 1.0,
            );
            numerics::grid_seed_with(&f, &rect, 32, seeds, &RootSettings::default())?
        }
    };
    Ok(roots)
}

/// Follows every pole of the given phase strips across `λ ∈ [lo, hi]`.
///
/// At each sample the strip is searched afresh (seeded with the previous
/// roots and certified by the argument principle); poles are linked across
/// samples by nearest neighbour.
pub fn pole_sweep(
    parity: Parity,
    lo: f64,
    hi: f64,
    samples: usize,
    strips: &[usize],
) -> Result<Vec<PoleTrack>> {
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || samples < MIN_SWEEP_SAMPLES {
        return Err(ScatteringError::InvalidSweep {
            min: MIN_SWEEP_SAMPLES,
        });
    }
    let lambdas: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let mut out = Vec::new();
    for &strip in strips {
        let mut tracks: Vec<Vec<PoleSample>> = Vec::new();
        for &lam in &lambdas {
            let seeds: Vec<Complex64> = tracks.iter().map(|t| t.last().unwrap().phi).collect();
            let roots = strip_roots(parity, strip, lam, &seeds)?;
            let lam_c = Complex64::new(lam, 0.0);
            let make = |phi: Complex64| {
                let k = k_of_phi(parity, phi, lam_c);
                PoleSample {
                    lambda: lam,
                    phi,
                    k,
                    class: classify(k),
                }
            };
            if tracks.is_empty() {
                tracks = roots.roots.iter().map(|&p| vec![make(p)]).collect();
                continue;
            }
            if roots.len() != tracks.len() {
                return Err(ScatteringError::LostPole {
                    lambda: lam,
                    found: roots.len(),
                    expected: tracks.len(),
                });
            }
            let mut free: Vec<Complex64> = roots.roots.clone();
            for t in tracks.iter_mut() {
                let prev = t.last().unwrap().phi;
                let (idx, _) = free
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, (p - prev).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                t.push(make(free.swap_remove(idx)));
            }
        }
        for samples in tracks {
            let last = samples.last().unwrap();
            let level_index = identify(parity, last.phi, Complex64::new(last.lambda, 0.0));
            out.push(PoleTrack {
                parity,
                strip,
                level_index,
                samples,
            });
        }
    }
    Ok(out)
}

/// What happens to a pair of poles sharing a strip during a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKinematics {
    /// Estimated `λ` where the pair reaches the imaginary axis.
    pub merge_lambda: f64,
    /// `k` at the first on-axis sample.
    pub merge_k: Complex64,
    /// Largest `|k_a + k_b*|` before the merge.
    pub symmetry_defect: f64,
    /// Estimated `λ` where a member crosses `k = 0`, if it does.
    pub crossing_lambda: Option<f64>,
    /// Members crossing the real axis.
    pub crossings: usize,
}

/// Merge and crossing data for two tracks from the same strip.
pub fn pair_kinematics(a: &PoleTrack, b: &PoleTrack) -> Option<PairKinematics> {
    let on_axis = |s: &PoleSample| s.k.re.abs() <= 1e-7 * (1.0 + s.k.norm());
    let n = a.samples.len().min(b.samples.len());
    let first = (0..n).find(|&i| on_axis(&a.samples[i]) && on_axis(&b.samples[i]))?;
    let merge_lambda = if first == 0 {
        a.samples[0].lambda
    } else {
        0.5 * (a.samples[first - 1].lambda + a.samples[first].lambda)
    };
    let symmetry_defect = (0..first)
        .map(|i| (a.samples[i].k + b.samples[i].k.conj()).norm())
        .fold(0.0, f64::max);
    let mut crossings = 0;
    let mut crossing_lambda = None;
    for t in [a, b] {
        for w in t.samples[first..].windows(2) {
            let (s0, s1) = (&w[0], &w[1]);
            if s0.k.im < 0.0 && s1.k.im >= 0.0 {
                crossings += 1;
                let f = -s0.k.im / (s1.k.im - s0.k.im);
                crossing_lambda = Some(s0.lambda + f * (s1.lambda - s0.lambda));
            }
        }
    }
    Some(PairKinematics {
        merge_lambda,
        merge_k: a.samples[first].k,
        symmetry_defect,
        crossing_lambda,
        crossings,
    })
}
