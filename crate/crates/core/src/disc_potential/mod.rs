//! Green's function of `-Δ` on the unit disc and the stream functions it generates.

mod boundary;
mod poisson;

use std::f64::consts::PI;

pub use boundary::{component_potential, log_integral, stream_boundary, stream_boundary_weighted};
pub use poisson::{solve_dirichlet, SolveStats, SOLVER_TOLERANCE};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{GridField, VectorField};
use crate::patch::{area_weighted_density, area_weighted_indicator, MultiScalePatch, PatchSpec};

fn in_disc(p: Point2) -> Result<()> {
    if p.is_finite() && p.in_closed_disc() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{p:?} is outside the closed unit disc")))
    }
}

/// Regular part `h(x, y) = -(1/2π) ln|x/|x| - |x| y|`, extended by `h(0, ·) = 0`.
pub fn green_regular(x: Point2, y: Point2) -> Result<f64> {
    in_disc(x)?;
    in_disc(y)?;
    // |x/|x| - |x|y|² = 1 - 2x·y + |x|²|y|², which is also the form that is
    // continuous at the origin.
    let q = 1.0 - 2.0 * x.dot(y) + x.norm_sq() * y.norm_sq();
    if q <= 0.0 {
        return Err(Error::Singular(x));
    }
    Ok(-q.ln() / (4.0 * PI))
}

/// `G(x, y) = (1/2π) ln(1/|x - y|) - h(x, y)`.
pub fn green(x: Point2, y: Point2) -> Result<f64> {
    let h = green_regular(x, y)?;
    let d = x.dist(y);
    if d == 0.0 {
        return Err(Error::Singular(x));
    }
    Ok(-d.ln() / (2.0 * PI) - h)
}

/// Stream function of the centred patch `1_{B_r}`.
pub fn stream_radial(r: f64, x: Point2) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("radius {r} is not in (0, 1]")));
    }
    in_disc(x)?;
    let s2 = x.norm_sq();
    let r2 = r * r;
    if s2 < r2 {
        Ok(0.25 * (r2 - 2.0 * r2 * r.ln() - s2))
    } else {
        Ok(-0.25 * r2 * s2.ln())
    }
}

/// `𝒢[1_D]` on the grid of `template`.
pub fn stream_patch(patch: &PatchSpec, template: &GridField) -> Result<GridField> {
    let rhs = area_weighted_indicator(patch, template);
    Ok(solve_dirichlet(&rhs)?.0)
}

/// `𝒢[Σ α_i 1_{D_i}]` on the grid of `template`.
pub fn stream_multiscale(patch: &MultiScalePatch, template: &GridField) -> Result<GridField> {
    let rhs = area_weighted_density(patch, template);
    Ok(solve_dirichlet(&rhs)?.0)
}

/// `𝒢[ω]` for a vorticity sampled at the grid nodes.
pub fn stream_field(omega: &GridField) -> Result<GridField> {
    Ok(solve_dirichlet(omega)?.0)
}

/// `u + Ω(|x|² - 1)/2`, the stream function relative to a frame rotating at `Ω`.
pub fn relative_stream(u: &GridField, omega: f64) -> GridField {
    let mut out = u.map(|v| v);
    out.lipschitz_bound = None;
    for j in 0..u.n() {
        for i in 0..u.n() {
            let r2 = u.point(i, j).norm_sq();
            out.set(i, j, u.get(i, j) + 0.5 * omega * (r2 - 1.0));
        }
    }
    out
}

/// `∇⊥u = (∂₂u, -∂₁u)`.
pub fn velocity(u: &GridField) -> VectorField {
    let g = u.gradient();
    VectorField { v1: g.v2, v2: g.v1.map(|v| -v) }
}
