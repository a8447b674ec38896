use super::decompose::decompose;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::GridField;

/// Smallest `∫∇u·∇φ = -h²Δ_h u` over hat functions `φ` whose stencil lies in the disc, with its node.
pub fn weak_superharmonic_defect(u: &GridField) -> (f64, Point2) {
    let n = u.n();
    let h2 = u.h() * u.h();
    let mut worst = (f64::INFINITY, Point2::ORIGIN);
    for j in 0..n {
        for i in 0..n {
            if let Some(lap) = u.laplacian_at(i, j) {
                let v = -lap * h2;
                if v < worst.0 {
                    worst = (v, u.point(i, j));
                }
            }
        }
    }
    worst
}

/// Whether `u` is a radially decreasing function on the disc, given `-Δu = rhs ≥ 0`.
pub fn radial_verdict(u: &GridField, superharmonic_rhs: &GridField, tol: f64) -> Result<bool> {
    u.check_same_grid(superharmonic_rhs)?;
    if let Some(k) = (0..superharmonic_rhs.values().len())
        .find(|&k| superharmonic_rhs.mask()[k] && superharmonic_rhs.values()[k] < -tol)
    {
        return Err(Error::Precondition(format!(
            "-Δu = {:.3e} < 0 at {:?}",
            superharmonic_rhs.values()[k],
            superharmonic_rhs.point_at(k)
        )));
    }
    let h = u.h();
    if weak_superharmonic_defect(u).0 < -tol {
        return Ok(false);
    }
    let Ok(d) = decompose(u, tol.max(2.0 * h)) else { return Ok(false) };
    let [a] = d.components.as_slice() else { return Ok(false) };
    // An outer radius short of the unit circle would mean a flat outer ring,
    // which a superharmonic field cannot have (Hopf). A core is admissible
    // only as a top plateau.
    let core_ok = a.inner_radius == 0.0 || a.core_dominates;
    Ok(a.center.norm() <= 2.0 * h && (a.outer_radius - 1.0).abs() <= 2.0 * h && core_ok && a.monotone)
}
