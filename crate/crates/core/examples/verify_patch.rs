//! The rigidity pipeline on rotating patches: radial patches pass every stage
//! outside the window, non-radial ones fail one, and the window is refused.
//!
//! ```text
//! cargo run --release --example verify_patch -- [grid-n]
//! ```

use vortex_rigidity::patch::{JordanPolygon, MultiScalePatch, PatchComponent};
use vortex_rigidity::rigidity::{verify_patch_rigidity, RotatingPatchProblem, VerifyConfig};
use vortex_rigidity::Point2;

fn main() -> vortex_rigidity::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(129);
    let config = VerifyConfig { n, n_dirs: 8, ..VerifyConfig::default() };

    let plain = |c: PatchComponent| MultiScalePatch::new(vec![(1.0, c)]);
    // A core of vorticity 2 inside a ring of vorticity 1.
    let layered = MultiScalePatch::new(vec![
        (2.0, PatchComponent::disc(Point2::ORIGIN, 0.25, 2048)?),
        (1.0, PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 2048)?),
    ])?;
    let cases = [
        ("disc r=0.5", plain(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048)?)?, -1.0),
        ("disc r=0.5", plain(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048)?)?, 0.5),
        ("annulus 0.3-0.6", plain(PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 2048)?)?, 0.0),
        ("two-level patch", layered.clone(), -0.5),
        ("two-level patch", layered, 1.0),
        ("ellipse", plain(PatchComponent::simple(JordanPolygon::ellipse(Point2::ORIGIN, 0.35, 0.25, 0.0, 2048)?))?, 0.0),
        ("off-centre disc", plain(PatchComponent::disc(Point2::new(0.25, 0.0), 0.2, 1024)?)?, -0.5),
        ("disc r=0.5", plain(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048)?)?, 0.25),
    ];
    for (name, patch, omega) in cases {
        let record = verify_patch_rigidity(&RotatingPatchProblem::multiscale(patch, omega)?, &config)?;
        let stages: Vec<String> = record.stages.iter().map(|s| format!("{}:{:?}", s.name, s.status)).collect();
        println!("{name:<16} Ω = {omega:>5}: {:<22} {}", record.verdict.to_string(), stages.join(" "));
    }
    Ok(())
}
