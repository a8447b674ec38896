//! q(t)/t for the energy deficit and the two lemma integrals along a dyadic
//! t-grid: ratios that decay are o(t), ratios that level off are Θ(t).

use vortex_rigidity::patch::{level_curves, JordanPolygon, PatchComponent, PatchSpec};
use vortex_rigidity::rigidity::*;
use vortex_rigidity::{GridField, Point2};

fn show(name: &str, r: &OSmallReport) {
    let ratios: Vec<String> = r.ratios.iter().map(|q| format!("{q:+.2e}")).collect();
    println!("{name:<34} {:<7} slope {:>5.2}  {}", r.verdict.to_string(), r.slope, ratios.join(" "));
}

fn main() -> vortex_rigidity::Result<()> {
    let t = dyadic_t_grid(3, 10);
    println!("t = 2^-3 … 2^-10\n");

    let cone = GridField::from_fn(129, |p| ((0.6 - p.dist(Point2::new(0.2, 0.0))) / 0.3).clamp(0.0, 1.0))?;
    show("plateau of an off-centre cone", &lemma_key1_check(&cone, 1.0, &t)?);

    let off = PatchSpec::single(PatchComponent::disc(Point2::new(0.25, 0.0), 0.2, 1024)?)?;
    let u = build_relative_stream(&RotatingPatchProblem::new(&off, 0.0)?, 129)?.field;
    let level = 0.6 * u.sup();
    if let Some(curve) = level_curves(&u, level).into_iter().find(|c| c.closed) {
        show("inside a level curve of its stream", &lemma_key2_check(&u, &curve.to_polygon()?, level, &t)?);
    }

    let ellipse = PatchSpec::single(PatchComponent::simple(JordanPolygon::ellipse(Point2::ORIGIN, 0.35, 0.25, 0.0, 1024)?))?;
    let w = build_relative_stream(&RotatingPatchProblem::new(&ellipse, 0.0)?, 129)?;
    show("ellipse energy, along its axis", &energy_stationarity(&w, 0.0, &t)?);
    show("ellipse energy, at 45 degrees", &energy_stationarity(&w, std::f64::consts::FRAC_PI_4, &t)?);

    let disc = PatchSpec::single(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048)?)?;
    let w = build_relative_stream(&RotatingPatchProblem::new(&disc, 0.0)?, 129)?;
    show("centred disc energy, at 45 degrees", &energy_stationarity(&w, std::f64::consts::FRAC_PI_4, &t)?);
    Ok(())
}
