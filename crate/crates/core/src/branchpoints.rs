//! Locations of the square-root branch points of the energy surfaces.
//!
//! Well branch points are the stationary points of `λ(σ)`; on the unit
//! circle these become `cot φ = −φ` (even) and `tan φ = φ` (odd). The delta
//! barrier ones solve `sin 2k = 2k`, with `g = −k cot k`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{self, Analytic, Rectangle, RootList, RootSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    EvenWell,
    OddWell,
    DeltaBarrier,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::EvenWell => "even-well",
            Family::OddWell => "odd-well",
            Family::DeltaBarrier => "delta-barrier",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchKind {
    /// Two energy levels meet.
    SquareRoot,
    /// A square-root point of the internal coordinate that leaves the energy
    /// single valued (the odd well at `λ = 1`).
    InternalSquareRoot,
    /// The origin of the well families: `ln σ` ramifies there on every
    /// sheet except the ground one.
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub family: Family,
    pub index: usize,
    /// Position in the parameter plane (`λ` or `g`).
    pub location: Complex64,
    /// The generating value: `σ` for the wells, `k` for the delta barrier.
    pub generator: Complex64,
    /// The continuation-chart coordinate at the branch point: the phase `φ`
    /// for the wells, the energy for the delta barrier.
    pub internal: Complex64,
    pub kind: BranchKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BranchPointError {
    #[error("index {0} is outside the supported range")]
    InvalidIndex(usize),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, BranchPointError>;

/// The two positive real roots of `ln σ = (σ²+1)/(σ²−1)`, larger first.
pub fn even_stationary_sigma() -> Result<[f64; 2]> {
    let f = |s: f64| s.ln() * (s * s - 1.0) - (s * s + 1.0);
    let big = numerics::bisect(f, 2.0, 5.0)?;
    let small = numerics::bisect(f, 0.1, 0.9)?;
    Ok([big, small])
}

/// The imaginary pair `∓i·0.6627…` where the ground level meets level 2.
pub fn ground_branch_lambda() -> Result<[BranchPoint; 2]> {
    let [s1, s2] = even_stationary_sigma()?;
    let make = |s: f64| {
        let sigma = Complex64::new(s, 0.0);
        let phase = Complex64::new(0.0, -s.ln());
        BranchPoint {
            family: Family::EvenWell,
            index: 1,
            location: phase / phase.cos(),
            generator: sigma,
            internal: phase,
            kind: BranchKind::SquareRoot,
        }
    };
    Ok([make(s1), make(s2)])
}

/// Real phase of the even pseudothreshold `n ≥ 2`: the root of
/// `cot φ = −φ` in `((n − 3/2)π, (n − 1)π)`.
pub fn even_threshold_phase(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(BranchPointError::InvalidIndex(n));
    }
    let a = (n as f64 - 1.5) * PI;
    let b = (n as f64 - 1.0) * PI;
    Ok(numerics::bisect(|p: f64| p.cos() + p * p.sin(), a, b)?)
}

/// Real phase of the odd pseudothreshold `k ≥ 1`: the root of `tan φ = φ`
/// in `(kπ, (k + 1/2)π)`.
pub fn odd_threshold_phase(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(BranchPointError::InvalidIndex(k));
    }
    let a = k as f64 * PI;
    let b = a + FRAC_PI_2;
    Ok(numerics::bisect(|p: f64| p.sin() - p * p.cos(), a, b)?)
}

fn sigma_of(phase: Complex64) -> Complex64 {
    (Complex64::i() * phase).exp()
}

/// Even pseudothresholds `λ_n`, `n = 2..=n_max`, alternating in sign.
///
/// The stored phase is the negative one, `−φ_n`; the mirrored point `−λ_n`
/// carries `+φ_n` (see [`even_branch_candidates`]).
pub fn even_pseudothresholds(n_max: usize) -> Result<Vec<BranchPoint>> {
    (2..=n_max)
        .map(|n| {
            let phase = Complex64::new(-even_threshold_phase(n)?, 0.0);
            Ok(BranchPoint {
                family: Family::EvenWell,
                index: n,
                location: Complex64::new(phase.re / phase.re.cos(), 0.0),
                generator: sigma_of(phase),
                internal: phase,
                kind: BranchKind::SquareRoot,
            })
        })
        .collect()
}

/// Odd branch points: `λ = 1` (index 0, internal only) and the
/// pseudothresholds `λ_k`, `k = 1..=k_max`.
pub fn odd_pseudothresholds(k_max: usize) -> Result<Vec<BranchPoint>> {
    let mut out = vec![BranchPoint {
        family: Family::OddWell,
        index: 0,
        location: Complex64::new(1.0, 0.0),
        generator: Complex64::new(1.0, 0.0),
        internal: Complex64::new(0.0, 0.0),
        kind: BranchKind::InternalSquareRoot,
    }];
    for k in 1..=k_max {
        let phase = odd_threshold_phase(k)?;
        out.push(BranchPoint {
            family: Family::OddWell,
            index: k,
            location: Complex64::new(phase / phase.sin(), 0.0),
            generator: sigma_of(Complex64::new(phase, 0.0)),
            internal: Complex64::new(phase, 0.0),
            kind: BranchKind::SquareRoot,
        });
    }
    Ok(out)
}

fn origin(family: Family) -> BranchPoint {
    BranchPoint {
        family,
        index: 0,
        location: Complex64::new(0.0, 0.0),
        generator: Complex64::new(0.0, 0.0),
        internal: Complex64::new(f64::INFINITY, 0.0),
        kind: BranchKind::Logarithmic,
    }
}

/// Every even-family singular point with `|λ| ≲ |λ_{n_max}|`: `±λ₁`, both
/// signs of each `λ_n`, and the logarithmic origin.
pub fn even_branch_candidates(n_max: usize) -> Result<Vec<BranchPoint>> {
    let mut out: Vec<BranchPoint> = ground_branch_lambda()?.to_vec();
    for bp in even_pseudothresholds(n_max)? {
        out.push(bp);
        out.push(BranchPoint {
            location: -bp.location,
            generator: bp.generator.inv(),
            internal: -bp.internal,
            ..bp
        });
    }
    out.push(origin(Family::EvenWell));
    Ok(out)
}

/// Odd-family candidates: `λ = 1`, the `λ_k`, and the origin.
pub fn odd_branch_candidates(k_max: usize) -> Result<Vec<BranchPoint>> {
    let mut out = odd_pseudothresholds(k_max)?;
    out.push(origin(Family::OddWell));
    Ok(out)
}

/// Root search for the `l`-th first-quadrant solution of `sin 2k = 2k`.
pub fn delta_branch_search(l: usize) -> Result<RootList> {
    if l < 1 {
        return Err(BranchPointError::InvalidIndex(l));
    }
    let lf = l as f64;
    let rect = Rectangle::from_bounds(
        ((lf - 0.25) * PI, (lf + 0.75) * PI),
        (0.3, 1.0 + (4.0 * PI * (lf + 1.0)).ln()),
    )?;
    // Divided by 2k so the rounding floor stays near machine epsilon.
    let f = Analytic::new(
        |k: Complex64| (k * 2.0).sin() / (k * 2.0) - 1.0,
        |k: Complex64| (k * 2.0).cos() / k - (k * 2.0).sin() / (k * k * 2.0),
    );
    // z = 2k solves sin z = z near (2l + 1/2)π + i ln((4l + 1)π).
    let guess = Complex64::new((2.0 * lf + 0.5) * PI, ((4.0 * lf + 1.0) * PI).ln()) * 0.5;
    Ok(numerics::grid_seed_with(
        &f,
        &rect,
        24,
        &[guess],
        &RootSettings::default(),
    )?)
}

/// `g(k) = −k cot k`, with the removable value `−1` at `k = 0`.
pub fn g_of_k(k: Complex64) -> Complex64 {
    if k.norm() < 1e-6 {
        let k2 = k * k;
        return -(Complex64::new(1.0, 0.0) - k2 / 3.0 - k2 * k2 / 45.0);
    }
    -k * k.cos() / k.sin()
}

/// Delta-barrier branch points: index 0 is `g = −1` (`k = 0`), then
/// `g_l` for `l = 1..=l_max` with `k_l` in the first quadrant.
pub fn delta_branchpoints(l_max: usize) -> Result<Vec<BranchPoint>> {
    let mut out = vec![BranchPoint {
        family: Family::DeltaBarrier,
        index: 0,
        location: Complex64::new(-1.0, 0.0),
        generator: Complex64::new(0.0, 0.0),
        internal: Complex64::new(0.0, 0.0),
        kind: BranchKind::SquareRoot,
    }];
    for l in 1..=l_max {
        let roots = delta_branch_search(l)?;
        let k = roots.roots[0];
        out.push(BranchPoint {
            family: Family::DeltaBarrier,
            index: l,
            location: g_of_k(k),
            generator: k,
            internal: k * k,
            kind: BranchKind::SquareRoot,
        });
    }
    Ok(out)
}

/// `g = −1`, each `g_l` and its conjugate.
pub fn delta_branch_candidates(l_max: usize) -> Result<Vec<BranchPoint>> {
    let mut out = Vec::new();
    for bp in delta_branchpoints(l_max)? {
        out.push(bp);
        if bp.index > 0 {
            out.push(BranchPoint {
                location: bp.location.conj(),
                generator: bp.generator.conj(),
                internal: bp.internal.conj(),
                ..bp
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaAsymptotics {
    pub l: usize,
    pub k: Complex64,
    /// `Re k_l / (lπ)`.
    pub re_ratio: f64,
    /// `Im k_l / ln l`.
    pub im_ratio: f64,
}

pub fn delta_asymptotics(
    l_range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<DeltaAsymptotics>> {
    l_range
        .map(|l| {
            let k = delta_branch_search(l)?.roots[0];
            let lf = l as f64;
            Ok(DeltaAsymptotics {
                l,
                k,
                re_ratio: k.re / (lf * PI),
                im_ratio: k.im / lf.ln(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stationary_sigma_pair() {
        let [a, b] = even_stationary_sigma().unwrap();
        assert_abs_diff_eq!(a, 3.3190501422372972, epsilon = 1e-12);
        assert_abs_diff_eq!(a * b, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ground_pair_is_imaginary() {
        let [p, m] = ground_branch_lambda().unwrap();
        assert_abs_diff_eq!(p.location.im, -0.662_743_419_349_181_6, epsilon = 1e-12);
        assert_abs_diff_eq!(p.location.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((p.location + m.location).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn even_thresholds_alternate() {
        let bps = even_pseudothresholds(5).unwrap();
        let expect = [
            2.971_693_870_713_802,
            -6.202_395_285_573_132,
            9.371_373_186_453_026,
            -12.526_433_784_761_06,
        ];
        for (bp, e) in bps.iter().zip(expect) {
            assert_abs_diff_eq!(bp.location.re, e, epsilon = 1e-11);
        }
    }

    #[test]
    fn odd_first_threshold() {
        let bps = odd_pseudothresholds(2).unwrap();
        assert_eq!(bps[0].kind, BranchKind::InternalSquareRoot);
        assert_abs_diff_eq!(bps[1].location.re, -4.603_338_848_751_7, epsilon = 1e-11);
        assert_abs_diff_eq!(bps[2].location.re, 7.789_705_767_492_725, epsilon = 1e-11);
    }

    #[test]
    fn delta_first_points() {
        let bps = delta_branchpoints(2).unwrap();
        assert_abs_diff_eq!(bps[1].generator.re, 3.748838138888193, epsilon = 1e-11);
        assert_abs_diff_eq!(bps[1].generator.im, 1.384339141493661, epsilon = 1e-11);
        assert_abs_diff_eq!(bps[1].location.re, -1.895282288928531, epsilon = 1e-10);
        assert_abs_diff_eq!(bps[2].location.im, 6.932966534415901, epsilon = 1e-10);
    }

    #[test]
    fn g_of_k_removable_point() {
        assert_abs_diff_eq!(g_of_k(Complex64::new(0.0, 0.0)).re, -1.0);
        let k = Complex64::new(1e-3, 0.0);
        assert_abs_diff_eq!(g_of_k(k).re, -k.re / k.re.tan(), epsilon = 1e-12);
    }
}
