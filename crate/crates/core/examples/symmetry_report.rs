//! Local symmetry and the annular decomposition of the relative stream
//! function, for a centred annulus and an off-centre disc.

use vortex_rigidity::patch::{PatchComponent, PatchSpec};
use vortex_rigidity::rigidity::{build_relative_stream, RotatingPatchProblem};
use vortex_rigidity::symmetry::{check_all_directions, decompose, radial_verdict};
use vortex_rigidity::Point2;

fn main() -> vortex_rigidity::Result<()> {
    let cases = [
        ("centred annulus, Ω = -1", PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 2048)?, -1.0),
        ("off-centre disc, Ω = -0.5", PatchComponent::disc(Point2::new(0.25, 0.0), 0.2, 1024)?, -0.5),
    ];
    for (name, component, omega) in cases {
        let w = build_relative_stream(&RotatingPatchProblem::new(&PatchSpec::single(component)?, omega)?, 129)?;
        println!("{name} ({} regime)", w.regime);
        for r in check_all_directions(&w.field, 8, 1e-3)? {
            println!("  direction {:.4}: mismatch {:.2e} / tolerance {:.2e} {}", r.direction, r.max_mismatch, r.tolerance, if r.passed { "ok" } else { "ASYMMETRIC" });
        }
        match decompose(&w.field, 2.0 * w.field.h()) {
            Ok(d) => {
                for c in &d.components {
                    println!(
                        "  annulus about ({:.3}, {:.3}), radii [{:.3}, {:.3}], monotone {}, circle-fit residual {:.1e}",
                        c.center.x1, c.center.x2, c.inner_radius, c.outer_radius, c.monotone, c.fit_residual
                    );
                }
            }
            Err(e) => println!("  no annular decomposition: {e}"),
        }
        println!("  radially decreasing about the origin: {}\n", radial_verdict(&w.field, &w.rhs, 1e-6)?);
    }
    Ok(())
}
