use std::collections::BTreeSet;
use std::f64::consts::PI;

use specwell::branchpoints::{
    delta_branch_candidates, even_branch_candidates, even_pseudothresholds, odd_branch_candidates,
    odd_pseudothresholds, BranchKind,
};
use specwell::continuation::{
    continue_level, monodromy, sheet_census, Chart, ContinuationError, ContinuationSettings,
    DeltaEnergy, EvenPhase, LevelId, LoopOptions, OddEnergy, OddPhase, Outcome, ParamPath,
};
use specwell::{Complex64, Family};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// Locations (rounded) of every candidate whose loop changes `level`.
fn nontrivial_set(
    chart: &dyn Chart,
    level: usize,
    candidates: &[specwell::BranchPoint],
) -> BTreeSet<(i64, i64)> {
    let opts = LoopOptions::new(chart.family(), candidates);
    let rows = sheet_census(chart, level..=level, candidates, &opts);
    rows[0]
        .entries
        .iter()
        .inspect(|e| assert!(!matches!(e.outcome, Outcome::Failed(_)), "{:?}", e))
        .filter(|e| e.outcome != Outcome::Trivial)
        .map(|e| key(e.branch_point.location))
        .collect()
}

fn key(z: Complex64) -> (i64, i64) {
    ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)
}

fn even_lambda(n: usize) -> Complex64 {
    even_pseudothresholds(n).unwrap().last().unwrap().location
}

#[test]
fn even_ground_sheet_has_only_the_imaginary_pair() {
    let cands = even_branch_candidates(6).unwrap();
    let l1 = cands[0].location;
    let expected: BTreeSet<_> = [key(l1), key(-l1)].into_iter().collect();
    assert_eq!(nontrivial_set(&EvenPhase, 1, &cands), expected);
}

#[test]
fn even_second_sheet() {
    let cands = even_branch_candidates(6).unwrap();
    let l1 = cands[0].location;
    let l2 = even_lambda(2);
    let expected: BTreeSet<_> = [key(l1), key(-l1), key(l2), key(-l2), key(real(0.0))]
        .into_iter()
        .collect();
    assert_eq!(nontrivial_set(&EvenPhase, 2, &cands), expected);
}

#[test]
fn even_sheets_pair_levels() {
    // Levels m and m+1 (m = 3, 5, 7) share a sheet cut by two adjacent
    // pseudothresholds of alternating sign plus the origin.
    let cands = even_branch_candidates(7).unwrap();
    for m in 3..=8 {
        let n = (m - 1) / 2 + 1;
        let expected: BTreeSet<_> = [key(even_lambda(n)), key(even_lambda(n + 1)), key(real(0.0))]
            .into_iter()
            .collect();
        assert_eq!(nontrivial_set(&EvenPhase, m, &cands), expected, "level {m}");
        assert!(even_lambda(n).re * even_lambda(n + 1).re < 0.0);
    }
}

#[test]
fn lambda_two_swaps_levels_two_and_three() {
    let cands = even_branch_candidates(6).unwrap();
    let mut opts = LoopOptions::new(Family::EvenWell, &cands);
    let l2 = even_lambda(2);
    let once = monodromy(&EvenPhase, 2, l2, &opts).unwrap();
    assert_eq!(once.outcome, Outcome::Permuted);
    assert_eq!(once.end, Some(LevelId::plain(3)));
    let back = monodromy(&EvenPhase, 3, l2, &opts).unwrap();
    assert_eq!(back.end, Some(LevelId::plain(2)));
    opts.turns = 2;
    let twice = monodromy(&EvenPhase, 2, l2, &opts).unwrap();
    assert_eq!(twice.outcome, Outcome::Trivial);
    assert!((twice.end_internal() - twice.start_internal()).norm() <= 1e-8);
}

#[test]
fn square_root_points_are_involutions() {
    let cands = even_branch_candidates(5).unwrap();
    let mut opts = LoopOptions::new(Family::EvenWell, &cands);
    opts.turns = 2;
    for level in 1..=5 {
        for bp in cands.iter().filter(|b| b.kind == BranchKind::SquareRoot) {
            let m = monodromy(&EvenPhase, level, bp.location, &opts).unwrap();
            assert!(
                (m.end_internal() - m.start_internal()).norm() <= 1e-8,
                "level {level} around {}",
                bp.location
            );
        }
    }
}

#[test]
fn origin_is_not_an_involution() {
    let cands = even_branch_candidates(5).unwrap();
    let mut opts = LoopOptions::new(Family::EvenWell, &cands);
    opts.turns = 2;
    let m = monodromy(&EvenPhase, 2, real(0.0), &opts).unwrap();
    assert_ne!(m.outcome, Outcome::Trivial);
}

#[test]
fn ordinary_point_is_trivial() {
    let cands = even_branch_candidates(5).unwrap();
    let mut opts = LoopOptions::new(Family::EvenWell, &cands);
    opts.radius = Some(0.5);
    for level in 1..=4 {
        let m = monodromy(&EvenPhase, level, c(1.5, 1.5), &opts).unwrap();
        assert_eq!(m.outcome, Outcome::Trivial);
        assert_eq!(m.end, Some(m.start));
    }
}

#[test]
fn odd_levels_two_and_three_share_a_sheet() {
    let cands = odd_branch_candidates(4).unwrap();
    let bps = odd_pseudothresholds(1).unwrap();
    let (one, l1) = (bps[0].location, bps[1].location);
    assert!(l1.re < 0.0);
    let expected: BTreeSet<_> = [key(one), key(l1), key(real(0.0))].into_iter().collect();
    assert_eq!(nontrivial_set(&OddPhase, 2, &cands), expected);
    assert_eq!(nontrivial_set(&OddPhase, 3, &cands), expected);

    // λ = 1 only flips σ ↔ 1/σ; in the energy chart it is invisible.
    let opts = LoopOptions::new(Family::OddWell, &cands);
    assert_eq!(
        monodromy(&OddPhase, 2, one, &opts).unwrap().outcome,
        Outcome::InternalOnly
    );
    assert_eq!(
        monodromy(&OddEnergy, 2, one, &opts).unwrap().outcome,
        Outcome::Trivial
    );

    // Level 2 continued through the upper half-plane reappears as level 3.
    let a = OddEnergy.anchor(2, 20.0).unwrap();
    let arc: Vec<Complex64> = (0..=32)
        .map(|i| Complex64::from_polar(20.0, PI * i as f64 / 32.0))
        .collect();
    let track = continue_level(
        &OddEnergy,
        a.param,
        a.internal,
        &ParamPath::open(arc).unwrap(),
        &Default::default(),
    )
    .unwrap();
    assert_eq!(
        OddEnergy.identify(-20.0, track.last().internal),
        Some(LevelId::plain(3))
    );

    // λ₁ itself swaps the real pair it creates.
    let m = monodromy(&OddEnergy, 3, l1, &opts).unwrap();
    assert_eq!(m.end, Some(LevelId::plain(4)));
}

#[test]
fn odd_second_level_through_unit_strength() {
    let a = OddEnergy.anchor(2, 20.0).unwrap();
    let path = ParamPath::open(vec![a.param, real(1.0), real(0.5), real(0.1), real(0.01)]).unwrap();
    let track = continue_level(
        &OddEnergy,
        a.param,
        a.internal,
        &path,
        &ContinuationSettings::default(),
    )
    .unwrap();
    for s in &track.samples {
        assert!(s.energy.im.abs() <= 1e-10 * (1.0 + s.energy.norm()));
        if s.param.re < 1.0 - 1e-9 {
            assert!(s.energy.re < 0.0, "λ = {}", s.param.re);
        }
    }
    let e: Vec<f64> = track.at_waypoints().map(|s| s.energy.re).collect();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    // Far below: λ sinh κ = κ, κ ≈ ln(2κ/λ).
    let kappa = (-e[4]).sqrt();
    assert!((0.01 * kappa.sinh() - kappa).abs() < 1e-9 * kappa);
}

#[test]
fn delta_star_structure() {
    let cands = delta_branch_candidates(4).unwrap();
    let located: Vec<_> = cands
        .iter()
        .filter(|b| b.location.im.abs() > 1e-9)
        .collect();
    let ground: BTreeSet<_> = located.iter().map(|b| key(b.location)).collect();
    assert_eq!(nontrivial_set(&DeltaEnergy, 1, &cands), ground);
    let opts = LoopOptions::new(Family::DeltaBarrier, &cands);
    for b in &located {
        let m = monodromy(&DeltaEnergy, 1, b.location, &opts).unwrap();
        assert_eq!(m.end, Some(LevelId::plain(b.index + 1)));
    }
    for l in 2..=4 {
        let expected: BTreeSet<_> = located
            .iter()
            .filter(|b| b.index == l - 1)
            .map(|b| key(b.location))
            .collect();
        assert_eq!(
            nontrivial_set(&DeltaEnergy, l, &cands),
            expected,
            "level {l}"
        );
    }
}

#[test]
fn delta_first_branch_point_involution() {
    let cands = delta_branch_candidates(3).unwrap();
    let g1 = cands
        .iter()
        .find(|b| b.index == 1 && b.location.im > 0.0)
        .unwrap()
        .location;
    let mut opts = LoopOptions::new(Family::DeltaBarrier, &cands);
    let once = monodromy(&DeltaEnergy, 1, g1, &opts).unwrap();
    assert_eq!(once.end, Some(LevelId::plain(2)));
    opts.turns = 2;
    let twice = monodromy(&DeltaEnergy, 1, g1, &opts).unwrap();
    assert!((twice.end_internal() - twice.start_internal()).norm() <= 1e-8);
}

#[test]
fn real_axis_continuation_of_ground_state() {
    let a = EvenPhase.anchor(1, 5.0).unwrap();
    let path = ParamPath::open(vec![real(5.0), real(8.0)]).unwrap();
    let track = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &path,
        &ContinuationSettings::default(),
    )
    .unwrap();
    let e: Vec<f64> = track.samples.iter().map(|s| s.energy.re).collect();
    assert!(e.windows(2).all(|w| w[1] > w[0]));
    assert!(*e.last().unwrap() < PI * PI / 4.0);
    let end = track.last();
    assert!((8.0 * end.internal.cos() - end.internal).norm() <= 1e-10);
}

#[test]
fn ground_state_survives_a_wide_loop() {
    let a = EvenPhase.anchor(1, 5.0).unwrap();
    let mut pts = vec![real(5.0), real(10.0)];
    pts.extend((1..=64).map(|i| Complex64::from_polar(10.0, 2.0 * PI * i as f64 / 64.0)));
    pts.push(real(5.0));
    let path = ParamPath::closed(pts).unwrap();
    let track = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &path,
        &ContinuationSettings::default(),
    )
    .unwrap();
    assert!((track.last().internal - a.internal).norm() < 1e-8);
}

#[test]
fn homotopic_paths_agree() {
    let a = EvenPhase.anchor(1, 5.0).unwrap();
    let arc: Vec<Complex64> = (0..=16)
        .map(|i| Complex64::from_polar(5.0, 0.5 * PI * i as f64 / 16.0))
        .collect();
    let chord = vec![real(5.0), c(3.0, 2.5), c(0.0, 5.0)];
    let s = ContinuationSettings::default();
    let x = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &ParamPath::open(arc).unwrap(),
        &s,
    )
    .unwrap();
    let y = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &ParamPath::open(chord).unwrap(),
        &s,
    )
    .unwrap();
    assert!((x.last().internal - y.last().internal).norm() < 1e-8);
}

#[test]
fn conjugate_paths_give_conjugate_tracks() {
    let a = EvenPhase.anchor(3, 20.0).unwrap();
    let pts = vec![a.param, c(12.0, 3.0), c(4.0, 1.0), c(-3.0, 2.0)];
    let conj: Vec<Complex64> = pts.iter().map(|z| z.conj()).collect();
    let s = ContinuationSettings::default();
    let x = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &ParamPath::open(pts).unwrap(),
        &s,
    )
    .unwrap();
    let y = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &ParamPath::open(conj).unwrap(),
        &s,
    )
    .unwrap();
    for (p, q) in x.at_waypoints().zip(y.at_waypoints()) {
        assert!((p.internal - q.internal.conj()).norm() < 1e-10);
    }
}

#[test]
fn residuals_hold_along_tracks() {
    let cands = even_branch_candidates(5).unwrap();
    let opts = LoopOptions::new(Family::EvenWell, &cands);
    let m = monodromy(&EvenPhase, 4, even_lambda(3), &opts).unwrap();
    for s in &m.track.samples {
        assert!(EvenPhase.scaled_residual(s.internal, s.param) <= 1e-10);
    }
    assert_eq!(m.path.start(), m.path.end());
}

#[test]
fn path_too_close_to_branch_point_is_rejected() {
    let l2 = even_lambda(2);
    let path = ParamPath::open(vec![real(5.0), l2 + 1e-6]).unwrap();
    let locations: Vec<Complex64> = even_branch_candidates(4)
        .unwrap()
        .iter()
        .map(|b| b.location)
        .collect();
    assert!(path.check_clearance(&locations).is_err());
}

#[test]
fn walking_onto_a_branch_point_collides() {
    let a = EvenPhase.anchor(2, 20.0).unwrap();
    let path = ParamPath::open(vec![a.param, even_lambda(2)]).unwrap();
    let r = continue_level(
        &EvenPhase,
        a.param,
        a.internal,
        &path,
        &ContinuationSettings::default(),
    );
    assert!(matches!(
        r,
        Err(ContinuationError::BranchPointCollision { .. })
            | Err(ContinuationError::StepUnderflow { .. })
    ));
}
