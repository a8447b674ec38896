use vortex_rigidity::patch::rotating_residual;
use vortex_rigidity::vstate::*;

const B: f64 = 0.5;
const M: usize = 3;

/// Linearizing the rotating-patch condition about the disc of radius `b`
/// gives the neutral angular velocity of the `m`-fold mode.
fn neutral_omega(b: f64, m: usize) -> f64 {
    let m = m as f64;
    (m - 1.0 + b.powf(2.0 * m)) / (2.0 * m)
}

#[test]
fn scan_finds_the_single_fundamental_bifurcation() {
    let found = bifurcation_scan(B, M, (-0.25, 0.75), 200).unwrap();
    assert_eq!(found.len(), 1, "{found:?}");
    assert!((found[0] - neutral_omega(B, M)).abs() < 1e-5, "{} vs {}", found[0], neutral_omega(B, M));
    assert!(found[0] > 0.0 && found[0] < 0.5);
}

#[test]
fn harmonic_crossings_are_reported_but_not_promoted() {
    let report = bifurcation_scan_report(B, M, DEFAULT_MODES, (-0.25, 0.75), 200).unwrap();
    assert!(report.crossings.len() > 1);
    for c in &report.crossings {
        let jm = c.dominant_mode * M;
        assert!((c.omega - neutral_omega(B, jm)).abs() < 1e-4, "{c:?}");
    }
    assert_eq!(report.candidates.len(), 1);
}

#[test]
fn scans_outside_the_window_are_empty() {
    assert!(bifurcation_scan(B, M, (0.5, 1.5), 200).unwrap().is_empty());
    assert!(bifurcation_scan(B, M, (-0.5, 0.0), 200).unwrap().is_empty());
}

#[test]
fn continued_branch_stays_inside_the_window() {
    let omega_star = bifurcation_scan(B, M, (-0.25, 0.75), 200).unwrap()[0];
    let seed = seed_branch(B, M, DEFAULT_MODES, omega_star, 1e-2).unwrap();
    let branch = continue_branch(&seed, 5e-3, 10).unwrap();
    assert!(branch.stopped.is_none(), "{:?}", branch.stopped);
    assert!(branch.points.len() >= 10);
    for p in &branch.points {
        assert!(p.residual_norm <= 1e-8, "{p:?}");
        assert!(p.omega > 0.0 && p.omega < 0.5, "{p:?}");
        assert!(p.amplitude >= 1e-4);
    }
    for w in branch.points.windows(2) {
        assert!(w[1].amplitude > w[0].amplitude);
    }

    // The branch leaves the neutral value quadratically in the amplitude.
    let first = &branch.points[0];
    assert!((first.omega - omega_star).abs() < 10.0 * first.amplitude.powi(2));

    // Non-radial points are rotating patches for the common solver as well.
    for p in [&branch.points[0], branch.points.last().unwrap()] {
        let n_theta = p.boundary.default_n_theta();
        let patch = p.boundary.patch(VERTICES_PER_NODE * n_theta).unwrap();
        let report = rotating_residual(&patch, p.omega, 1).unwrap();
        assert!(report.max_deviation <= 10.0 * SOLVER_TOLERANCE, "{} at a1 = {}", report.max_deviation, p.amplitude);
    }
}

#[test]
fn zero_count_returns_the_seed() {
    let seed = seed_branch(B, M, 4, neutral_omega(B, M), 1e-2).unwrap();
    let branch = continue_branch(&seed, 5e-3, 0).unwrap();
    assert_eq!(branch.points, vec![seed]);
}

#[test]
fn oversized_step_truncates_with_the_geometry_error() {
    let seed = seed_branch(B, M, 4, neutral_omega(B, M), 1e-2).unwrap();
    let branch = continue_branch(&seed, 1.5, 5).unwrap();
    assert_eq!(branch.points.len(), 1);
    let why = branch.stopped.expect("a stop reason");
    assert!(why.contains("disc") || why.contains("geometry"), "{why}");
}

#[test]
fn perturbed_discs_relax_outside_the_window() {
    let sweep = radial_sweep(B, M, DEFAULT_MODES, &[-0.5, -0.1, 0.0, 0.5, 0.8], 2, 1e-2, 11).unwrap();
    assert_eq!(sweep.len(), 10);
    for s in &sweep {
        assert!(s.start_max_coefficient > 1e-3);
        assert!(s.is_radial(), "{s:?}");
    }
}

#[test]
fn sweeps_are_reproducible() {
    let a = radial_sweep(B, M, 4, &[0.8], 2, 1e-2, 3).unwrap();
    let b = radial_sweep(B, M, 4, &[0.8], 2, 1e-2, 3).unwrap();
    assert_eq!(a, b);
}
