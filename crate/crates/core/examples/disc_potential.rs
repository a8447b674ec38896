//! The Dirichlet Green function of the unit disc and three ways of computing
//! the stream function of a centred disc patch: the closed form, the boundary
//! integral over its polygon, and the cut-cell grid solve.

use vortex_rigidity::disc_potential::{green, solve_dirichlet, stream_boundary, stream_patch, stream_radial};
use vortex_rigidity::patch::{indicator, PatchComponent, PatchSpec};
use vortex_rigidity::{GridField, Point2};

fn main() -> vortex_rigidity::Result<()> {
    let (x, y) = (Point2::new(0.3, -0.2), Point2::new(-0.1, 0.5));
    println!("G(x, y) = {:.12}, G(y, x) = {:.12}", green(x, y)?, green(y, x)?);
    println!("G(x, e) for e on the unit circle = {:.1e}", green(x, Point2::new(0.6, 0.8))?);

    let r = 0.5;
    let patch = PatchSpec::single(PatchComponent::disc(Point2::ORIGIN, r, 16384)?)?;
    let u = stream_patch(&patch, &GridField::zeros(257)?)?;
    println!("\n{:>14} {:>14} {:>14} {:>14}", "point", "closed form", "boundary int.", "grid (n=257)");
    for p in [Point2::ORIGIN, Point2::new(0.25, 0.0), Point2::new(0.3, 0.4), Point2::new(0.0, 0.75)] {
        println!(
            "{:>14} {:>14.10} {:>14.10} {:>14.10}",
            format!("({}, {})", p.x1, p.x2),
            stream_radial(r, p)?,
            stream_boundary(&patch, p)?,
            u.sample(p)
        );
    }

    let (_, stats) = solve_dirichlet(&indicator(&patch, &GridField::zeros(257)?))?;
    println!("\nconjugate gradients: {} iterations, relative residual {:.1e}", stats.iterations, stats.relative_residual);
    Ok(())
}
