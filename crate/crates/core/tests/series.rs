use std::f64::consts::PI;

use specwell::branchpoints::{delta_branchpoints, even_pseudothresholds};
use specwell::deltabarrier::{delta_series, delta_spectrum};
use specwell::numerics::bisect;
use specwell::perturbation::{
    convergence_report, direct_value, leading_term, radius_limit, series_coefficients,
    PerturbationError, SeriesCenter,
};
use specwell::{Complex64, Family};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Even ground energy at real `λ > 0` by bisection of `λ cos φ = φ`.
fn ground_energy(lambda: f64) -> f64 {
    let phi = bisect(|p| lambda * p.cos() - p, 0.0, PI / 2.0).unwrap();
    phi * phi
}

fn rel(a: Complex64, b: f64) -> f64 {
    (a - b).norm() / b.abs()
}

#[test]
fn ground_series_matches_direct_values() {
    let s = series_coefficients(Family::EvenWell, 1, 30, None, SeriesCenter::Infinity).unwrap();
    assert!((s.quadrature_constant - s.leading_term).norm() < 1e-9);
    assert!((s.coefficients[0].re + PI * PI / 2.0).abs() < 1e-9);
    for lam in [5.0, 10.0, 20.0] {
        assert!(
            rel(s.evaluate(real(lam)), ground_energy(lam)) <= 1e-6,
            "λ = {lam}"
        );
    }
    let l2 = even_pseudothresholds(2).unwrap()[0].location.norm();
    assert!(
        (s.estimated_radius - l2).abs() <= 0.1 * l2,
        "{}",
        s.estimated_radius
    );
}

#[test]
fn coefficients_are_real_for_real_levels() {
    let s = series_coefficients(Family::EvenWell, 2, 20, None, SeriesCenter::Infinity).unwrap();
    for a in &s.coefficients {
        assert!(a.im.abs() <= 1e-9 * (1.0 + a.norm()));
    }
}

#[test]
fn leading_terms() {
    let q = |x: f64| x * x;
    assert_eq!(
        leading_term(Family::EvenWell, 1, SeriesCenter::Infinity).unwrap(),
        q(PI / 2.0)
    );
    assert_eq!(
        leading_term(Family::EvenWell, 5, SeriesCenter::Infinity).unwrap(),
        q(5.0 * PI / 2.0)
    );
    assert_eq!(
        leading_term(Family::EvenWell, 4, SeriesCenter::Infinity).unwrap(),
        q(3.0 * PI / 2.0)
    );
    assert_eq!(
        leading_term(Family::OddWell, 2, SeriesCenter::Infinity).unwrap(),
        q(PI)
    );
    assert_eq!(
        leading_term(Family::DeltaBarrier, 2, SeriesCenter::Origin).unwrap(),
        q(1.5 * PI)
    );
    assert!(leading_term(Family::OddWell, 2, SeriesCenter::Origin).is_err());
}

#[test]
fn fifth_level_converges_outside_its_sheet_points() {
    let s = series_coefficients(Family::EvenWell, 5, 30, None, SeriesCenter::Infinity).unwrap();
    assert!((s.quadrature_constant - s.leading_term).norm() < 1e-8);
    let l4 = even_pseudothresholds(4).unwrap()[2].location.norm();
    let r = 1.5 * l4;
    // Level 5 lives on negative real λ: solve λ cos φ = φ on the outer branch.
    let lam = -r;
    let t = specwell::branchpoints::even_threshold_phase(3).unwrap();
    let phi = bisect(|p| lam * p.cos() - p, -2.5 * PI + 1e-12, -t).unwrap();
    assert!(rel(s.evaluate(real(lam)), phi * phi) <= 1e-6);
    let pts: Vec<Complex64> = (0..8)
        .map(|i| Complex64::from_polar(r, PI * i as f64 / 4.0 + 0.1))
        .collect();
    for row in convergence_report(&s, &pts).unwrap() {
        assert!(row.final_error() <= 1e-6, "{}", row.point);
        assert!(!row.diverging);
    }
}

#[test]
fn odd_series_second_level() {
    let s = series_coefficients(Family::OddWell, 2, 30, None, SeriesCenter::Infinity).unwrap();
    let phi = bisect(|p| 20.0 * p.sin() - p, 0.5 * PI, PI - 1e-12).unwrap();
    assert!(rel(s.evaluate(real(20.0)), phi * phi) <= 1e-8);
}

#[test]
fn delta_origin_series() {
    let s = delta_series(1, SeriesCenter::Origin, 30).unwrap();
    let direct = delta_spectrum(0.5, 1).unwrap().even[0].energy;
    assert!((s.evaluate(real(0.5)) - direct).norm() <= 1e-8 * direct.norm());
    // First-order shift: dE/dg at g = 0 is 2 for every even level.
    assert!((s.coefficients[0].re - 2.0).abs() < 1e-10);
    let g1 = delta_branchpoints(1).unwrap()[1].location.norm();
    assert!(
        (s.estimated_radius - g1).abs() <= 0.1 * g1,
        "{}",
        s.estimated_radius
    );
}

#[test]
fn delta_large_coupling_series() {
    for l in 1..=3 {
        let s = delta_series(l, SeriesCenter::Infinity, 30).unwrap();
        let gl = delta_branchpoints(l + 1).unwrap()[l + 1].location.norm();
        let g = 1.2 * gl;
        let direct = delta_spectrum(g, l).unwrap().even[l - 1].energy;
        assert!(
            (s.evaluate(real(g)) - direct).norm() <= 1e-6 * direct.norm(),
            "level {l}"
        );
        let pts = [
            real(-g),
            Complex64::new(0.0, g),
            Complex64::from_polar(g, 2.0),
        ];
        for row in convergence_report(&s, &pts).unwrap() {
            assert!(row.final_error() <= 1e-6, "level {l} at {}", row.point);
        }
    }
}

#[test]
fn direct_value_agrees_with_real_oracle() {
    let s = series_coefficients(Family::EvenWell, 1, 10, None, SeriesCenter::Infinity).unwrap();
    let v = direct_value(&s, real(7.0)).unwrap();
    assert!(rel(v, ground_energy(7.0)) < 1e-12);
}

#[test]
fn contour_must_respect_the_sheet() {
    let limit = radius_limit(Family::EvenWell, 1, SeriesCenter::Infinity).unwrap();
    let e = series_coefficients(
        Family::EvenWell,
        1,
        10,
        Some(0.5 * limit),
        SeriesCenter::Infinity,
    );
    assert!(matches!(e, Err(PerturbationError::ContourRadius { .. })));
    let e = series_coefficients(Family::EvenWell, 1, 0, None, SeriesCenter::Infinity);
    assert!(matches!(e, Err(PerturbationError::InvalidOrder)));
    let e = series_coefficients(Family::EvenWell, 0, 10, None, SeriesCenter::Infinity);
    assert!(matches!(e, Err(PerturbationError::InvalidLevel { .. })));
}

#[test]
fn partial_sums_improve_outside_the_radius() {
    let s = series_coefficients(Family::EvenWell, 1, 30, None, SeriesCenter::Infinity).unwrap();
    let row = &convergence_report(&s, &[real(8.0)]).unwrap()[0];
    assert!(row.errors[29] < 1e-3 * row.errors[4]);
    let ratio = row.observed_ratio.unwrap();
    assert!((ratio - row.expected_ratio).abs() < 0.25 * row.expected_ratio);
}
