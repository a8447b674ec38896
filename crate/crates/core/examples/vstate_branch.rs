//! Locates where the disc of radius 1/2 bifurcates into 3-fold rotating
//! patches, follows the branch, and checks that random perturbations of the
//! disc relax back to it outside the bifurcation window.

use std::time::Instant;

use vortex_rigidity::vstate::*;

fn main() -> vortex_rigidity::Result<()> {
    let (b, m) = (0.5, 3);
    let clock = Instant::now();
    let scan = bifurcation_scan_report(b, m, DEFAULT_MODES, (-0.25, 0.75), 200)?;
    for c in &scan.crossings {
        println!("det J = 0 at Ω = {:.6}  (mode {} dominates, |v₁| = {:.2e})", c.omega, c.dominant_mode, c.fundamental_weight);
    }
    println!("fundamental bifurcations: {:?}  [{:.1}s]", scan.candidates, clock.elapsed().as_secs_f64());

    for &omega_star in &scan.candidates {
        let seed = seed_branch(b, m, DEFAULT_MODES, omega_star, 1e-2)?;
        let branch = continue_branch(&seed, 5e-3, 10)?;
        println!("branch from Ω* = {omega_star:.6}:");
        for p in &branch.points {
            println!("  a₁ = {:.4}  Ω = {:.8}  residual = {:.1e}  ({} Newton steps)", p.amplitude, p.omega, p.residual_norm, p.iterations);
        }
        if let Some(why) = &branch.stopped {
            println!("  stopped: {why}");
        }
        write_branch_csv(&branch.points, std::io::stdout().lock())?;
    }
    println!("[{:.1}s]", clock.elapsed().as_secs_f64());

    let sweep = radial_sweep(b, m, DEFAULT_MODES, &[-0.5, -0.1, 0.0, 0.5, 0.8], 3, 1e-2, 7)?;
    for s in &sweep {
        println!(
            "Ω = {:+.2} trial {}: max|a| {:.1e} -> {:.1e}{}",
            s.omega,
            s.trial,
            s.start_max_coefficient,
            s.final_max_coefficient,
            s.error.as_deref().map(|e| format!("  ({e})")).unwrap_or_default()
        );
    }
    println!("all radial: {}  [{:.1}s]", sweep.iter().all(SweepOutcome::is_radial), clock.elapsed().as_secs_f64());
    Ok(())
}
