//! Builds the standard patch fixtures, reports their geometry and how far
//! each is from rotating rigidly, and writes them as patch files.
//!
//! ```text
//! cargo run --release --example patch_files -- [output-dir]
//! ```

use std::path::PathBuf;

use vortex_rigidity::patch::{classify, radiality_measure, rotating_residual, write_patch, JordanPolygon, MultiScalePatch, PatchComponent, PatchSpec};
use vortex_rigidity::Point2;

fn main() -> vortex_rigidity::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;

    let fixtures = [
        ("disc", PatchSpec::single(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048)?)?),
        ("annulus", PatchSpec::single(PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 2048)?)?),
        ("ellipse", PatchSpec::single(PatchComponent::simple(JordanPolygon::ellipse(Point2::ORIGIN, 0.35, 0.25, 0.0, 2048)?))?),
        ("offset_disc", PatchSpec::single(PatchComponent::disc(Point2::new(0.2, 0.1), 0.3, 2048)?)?),
    ];

    println!("{:<12} {:>8} {:>16} {:>10}  max deviation of G[1_D] + Ω|x|²/2 on ∂D", "patch", "area", "class", "radiality");
    for (name, patch) in &fixtures {
        let deviations: Vec<String> = [-1.0, 0.0, 0.25, 0.5, 2.0]
            .iter()
            .map(|&omega| Ok(format!("Ω={omega}: {:.1e}", rotating_residual(patch, omega, 2)?.max_deviation)))
            .collect::<vortex_rigidity::Result<_>>()?;
        println!("{name:<12} {:>8.5} {:>16} {:>10.2e}  {}", patch.area(), classify(patch).to_string(), radiality_measure(patch), deviations.join("  "));
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, write_patch(&MultiScalePatch::from_patch(patch)))?;
    }
    println!("patch files written to {}", dir.display());
    Ok(())
}
