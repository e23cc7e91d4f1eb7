use std::f64::consts::PI;

use specwell::branchpoints::even_pseudothresholds;
use specwell::quantization::real_spectrum;
use specwell::scattering::{
    coefficients, pair_kinematics, parity_coefficients, parity_denominator, pole_from_level,
    pole_from_phi, pole_sweep, PoleClass, ScatteringError,
};
use specwell::{Complex64, Parity};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

type M2 = [[Complex64; 2]; 2];

fn mul(a: M2, b: M2) -> M2 {
    let mut o = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn inv(a: M2) -> M2 {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// Matching matrix of `(e^{iqx}, e^{−iqx})` amplitudes to `(ψ, ψ')` at `x`.
fn wall(q: f64, x: f64) -> M2 {
    let i = Complex64::i();
    let p = (i * q * x).exp();
    let m = (-i * q * x).exp();
    [[p, m], [i * q * p, -i * q * m]]
}

/// Transmission and reflection of a unit wave through a well of depth
/// `λ²` on `|x| < 1`, by plane-wave matching.
fn transfer_oracle(k: f64, lambda: f64) -> (Complex64, Complex64) {
    let kp = (k * k + lambda * lambda).sqrt();
    let p = mul(
        mul(inv(wall(k, 1.0)), wall(kp, 1.0)),
        mul(inv(wall(kp, -1.0)), wall(k, -1.0)),
    );
    let r = -p[1][0] / p[1][1];
    (p[0][0] + p[0][1] * r, r)
}

#[test]
fn amplitudes_match_plane_wave_matching() {
    for &(k, lam) in &[(0.3, 1.0), (2.0, 2.5), (7.1, 0.4), (15.0, 12.0)] {
        let s = coefficients(c(k, 0.0), c(lam, 0.0)).unwrap();
        let (t, r) = transfer_oracle(k, lam);
        assert!((s.t - t).norm() < 1e-12, "T at k={k}, λ={lam}");
        assert!(
            (s.r.norm() - r.norm()).abs() < 1e-12,
            "|R| at k={k}, λ={lam}"
        );
    }
}

#[test]
fn parity_pairs_are_unitary() {
    for &(k, lam) in &[(0.3, 1.0), (2.0, 2.5), (7.1, 0.4)] {
        for parity in [Parity::Even, Parity::Odd] {
            let (t, r) = parity_coefficients(parity, c(k, 0.0), c(lam, 0.0)).unwrap();
            assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn bound_levels_are_poles_on_the_imaginary_axis() {
    let lam = 10.0;
    let table = real_spectrum(lam).unwrap();
    assert_eq!(table.levels.len(), 7);
    for level in &table.levels {
        let rec = pole_from_level(level, lam).unwrap();
        let d = parity_denominator(level.parity, rec.k, c(level.sign * lam, 0.0));
        assert!(
            d.norm() <= 1e-10,
            "level {} |D| = {:e}",
            level.index,
            d.norm()
        );
        assert_eq!(rec.classification, PoleClass::BoundState);
        assert!(rec.k.im > 0.0);
        // Binding energy: E − λ² = k² < 0.
        assert!(((rec.k * rec.k).re + lam * lam - level.energy).abs() < 1e-9 * lam * lam);
    }
}

#[test]
fn pole_requires_a_solution() {
    let e = pole_from_phi(Parity::Even, c(1.0, 0.0), c(2.0, 0.0));
    assert!(matches!(e, Err(ScatteringError::ConditionViolated { .. })));
}

#[test]
fn amplitude_excludes_the_origin() {
    assert!(matches!(
        coefficients(c(0.0, 0.0), c(1.0, 0.0)),
        Err(ScatteringError::OriginK)
    ));
}

#[test]
fn even_pair_kinematics_near_the_second_pseudothreshold() {
    let l2 = even_pseudothresholds(2).unwrap()[0].location.re;
    let tracks = pole_sweep(Parity::Even, 2.5, 3.5, 500, &[1]).unwrap();
    assert_eq!(tracks.len(), 2);
    let k = pair_kinematics(&tracks[0], &tracks[1]).unwrap();
    assert!((k.merge_lambda - l2).abs() <= 0.01);
    assert!(k.merge_k.im < 0.0);
    assert!(k.symmetry_defect < 1e-10);
    assert_eq!(k.crossings, 1);
    assert!((k.crossing_lambda.unwrap() - PI).abs() <= 0.01);
    let mut labels: Vec<usize> = tracks.iter().map(|t| t.level_index).collect();
    labels.sort();
    assert_eq!(labels, vec![2, 3]);
    // At λ = 3.3 exactly one member is bound.
    let idx = tracks[0]
        .samples
        .iter()
        .position(|s| s.lambda >= 3.3)
        .unwrap();
    let bound = tracks
        .iter()
        .filter(|t| t.samples[idx].class == PoleClass::BoundState)
        .count();
    assert_eq!(bound, 1);
}

#[test]
fn sweep_rejects_short_ranges() {
    assert!(matches!(
        pole_sweep(Parity::Even, 2.5, 3.5, 10, &[1]),
        Err(ScatteringError::InvalidSweep { .. })
    ));
    assert!(pole_sweep(Parity::Even, 3.5, 2.5, 200, &[1]).is_err());
}
