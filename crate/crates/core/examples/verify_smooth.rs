//! Smooth rotating vorticities: the step-function approximation and the
//! two-sided pipeline built on it.

use vortex_rigidity::rigidity::{step_approximation, verify_smooth_rigidity, RotatingSmoothProblem, VerifyConfig};
use vortex_rigidity::GridField;

fn main() -> vortex_rigidity::Result<()> {
    let config = VerifyConfig::default();
    let n = config.n;
    let radial = GridField::from_fn(n, |p| (1.0 - p.norm_sq() / 0.36).max(0.0).powi(2))?;
    let elliptical = GridField::from_fn(n, |p| (1.0 - ((p.x1 - 0.15) / 0.6).powi(2) - (p.x2 / 0.45).powi(2)).max(0.0).powi(3))?;

    println!("{:>10} {:>4} {:>12} {:>12}  levels", "field", "k", "sup error", "(2/k)|w|");
    for (name, field) in [("radial", &radial), ("elliptical", &elliptical)] {
        for k in [4, 8, 16] {
            let s = step_approximation(field, k)?;
            let levels: Vec<String> = s.levels.iter().map(|c| format!("{c:.3}")).collect();
            println!("{name:>10} {k:>4} {:>12.4e} {:>12.4e}  {}", s.sup_error, s.bound, levels.join(" "));
        }
    }

    // Positive on the whole disc, so its low levels crowd the unit circle where
    // the gradient is too small for them to count as regular.
    let gaussian = GridField::from_fn(n, |p| (-8.0 * ((p.x1 - 0.2).powi(2) + 2.0 * p.x2 * p.x2)).exp() * (1.0 - p.norm_sq()).max(0.0))?;
    if let Err(e) = step_approximation(&gaussian, 16) {
        println!("{:>10} {:>4} {e}", "gaussian", 16);
    }

    println!();
    for (name, field) in [("radial", &radial), ("elliptical", &elliptical)] {
        for omega in [field.inf() / 2.0 - 0.1, field.sup() / 2.0 + 0.1] {
            let r = verify_smooth_rigidity(&RotatingSmoothProblem::new(field.clone(), omega)?, &config)?;
            println!("{name} Ω = {omega:.3} ({}): {}{}", r.regime, r.verdict, r.failing_stage.map(|s| format!(" at {s}")).unwrap_or_default());
        }
    }
    Ok(())
}
