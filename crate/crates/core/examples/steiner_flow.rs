//! Continuous Steiner symmetrization: the event-driven flow of interval
//! unions, and the flow of a grid field whose energy it lowers.

use vortex_rigidity::csts::properties::Bump;
use vortex_rigidity::csts::{csts_field, dirichlet_energy, flow_set, flow_set_traced, symmetrize_set, IntervalUnion};
use vortex_rigidity::{GridField, Point2};

fn main() -> vortex_rigidity::Result<()> {
    let m = IntervalUnion::new(vec![(-3.0, -1.0), (0.5, 1.0), (1.5, 3.0)])?;
    let (_, trace) = flow_set_traced(&m, 4.0)?;
    println!("M = {:?}, |M| = {}", m.intervals(), m.total_length());
    for (t, state) in &trace.events {
        println!("  merge at t = {t:.6}: {state:?}");
    }
    println!("T_inf(M) = {:?}, M* = {:?}", flow_set(&m, f64::INFINITY)?.intervals(), symmetrize_set(&m).intervals());
    for t in [0.25, 0.5, 1.0, 2.0] {
        println!("T_{t}(M) = {:?}", flow_set(&m, t)?.intervals());
    }

    // Rows of a sheared bump are centred at x₂; the flow undoes the shear.
    let bump = Bump { center: Point2::ORIGIN, radius: 0.35, height: 1.0 };
    let u = GridField::from_fn(129, |x| bump.value(Point2::new(x.x1 - 0.8 * x.x2, x.x2)))?;
    println!("\n{:>6} {:>12} {:>12}", "t", "energy", "sup|u^t-u|");
    for t in [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, f64::INFINITY] {
        let ut = csts_field(&u, t)?;
        println!("{t:>6} {:>12.6} {:>12.4e}", dirichlet_energy(&ut), ut.sup_distance(&u)?);
    }
    Ok(())
}
