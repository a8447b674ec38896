//! Uniformly rotating patches near the disc: an m-fold Fourier ansatz for the
//! boundary, its residual, a Newton solver and branch continuation.

mod branch;
mod newton;

pub use branch::{
    bifurcation_scan, bifurcation_scan_report, continue_branch, gnuplot_script, radial_sweep, seed_branch, write_branch_csv, Branch,
    Crossing, ScanReport, ScanSample, SweepOutcome,
};
pub use newton::{newton_solve, newton_solve_with, NewtonOptions, Pin};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::disc_potential::component_potential;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::patch::{JordanPolygon, PatchComponent, PatchSpec};

/// Largest number of Fourier modes in the ansatz.
pub const MAX_MODES: usize = 64;
/// Default number of modes `J`.
pub const DEFAULT_MODES: usize = 8;
/// Polygon vertices per evaluation node.
pub const VERTICES_PER_NODE: usize = 16;
/// Residual 2-norm at which Newton stops.
pub const SOLVER_TOLERANCE: f64 = 1e-8;

/// `r(θ) = b(1 + Σ_j a_j cos(j m θ))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierBoundary {
    b: f64,
    m: usize,
    a: Vec<f64>,
}

impl FourierBoundary {
    pub fn new(b: f64, m: usize, a: Vec<f64>) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!("base radius {b} is not in (0, 1)")));
        }
        if m == 0 {
            return Err(Error::Domain("the fold m must be at least 1".into()));
        }
        if a.is_empty() || a.len() > MAX_MODES {
            return Err(Error::Domain(format!("{} modes requested, allowed 1..={MAX_MODES}", a.len())));
        }
        if let Some(v) = a.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("coefficient {v} is not finite")));
        }
        let fb = FourierBoundary { b, m, a };
        fb.check_radii(VERTICES_PER_NODE * fb.default_n_theta(), 0.0)?;
        Ok(fb)
    }

    /// The circle `r = b` carried with `modes` zero coefficients.
    pub fn circle(b: f64, m: usize, modes: usize) -> Result<Self> {
        Self::new(b, m, vec![0.0; modes])
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    /// `|a₁|`.
    pub fn amplitude(&self) -> f64 {
        self.a[0].abs()
    }

    /// `8·J·m`, the smallest admissible node count.
    pub fn default_n_theta(&self) -> usize {
        8 * self.a.len() * self.m
    }

    /// Same base and fold with new coefficients.
    pub fn with_coefficients(&self, a: Vec<f64>) -> Result<Self> {
        Self::new(self.b, self.m, a)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        let m = self.m as f64;
        let s: f64 = self.a.iter().enumerate().map(|(j, a)| a * ((j + 1) as f64 * m * theta).cos()).sum();
        self.b * (1.0 + s)
    }

    pub fn point(&self, theta: f64) -> Point2 {
        Point2::polar(self.radius(theta), theta)
    }

    fn check_radii(&self, n: usize, phase: f64) -> Result<()> {
        for k in 0..n {
            let th = phase + 2.0 * PI * k as f64 / n as f64;
            let r = self.radius(th);
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Geometry(format!("r({th:.4}) = {r} leaves (0, 1)")));
            }
        }
        Ok(())
    }

    /// Vertices at `θ_k = phase + 2πk/n`; a polar graph with positive radius is a simple loop.
    pub fn polygon(&self, n: usize, phase: f64) -> Result<JordanPolygon> {
        self.check_radii(n, phase)?;
        Ok(JordanPolygon::new_unchecked((0..n).map(|k| self.point(phase + 2.0 * PI * k as f64 / n as f64)).collect()))
    }

    /// The patch bounded by the polygon of `vertices` vertices.
    pub fn patch(&self, vertices: usize) -> Result<PatchSpec> {
        PatchSpec::single(PatchComponent::simple(self.polygon(vertices, 0.0)?))
    }
}

/// A converged solution of the rotating-patch equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub omega: f64,
    pub boundary: FourierBoundary,
    pub residual_norm: f64,
    /// `|a₁|`.
    pub amplitude: f64,
    pub iterations: usize,
}

impl BranchPoint {
    /// Largest `|a_j|`; zero for the disc.
    pub fn max_coefficient(&self) -> f64 {
        self.boundary.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_nodes(boundary: &FourierBoundary, n_theta: usize) -> Result<()> {
    if n_theta < boundary.default_n_theta() {
        return Err(Error::Domain(format!("n_theta = {n_theta} is below 8·J·m = {}", boundary.default_n_theta())));
    }
    Ok(())
}

/// `Ψ(θ_i) = 𝒢[1_D](x(θ_i)) + (Ω/2)|x(θ_i)|²` at `θ_i = phase + 2πi/n_theta`.
///
/// `D` is the polygon with `16·n_theta` vertices through the nodes.
pub fn boundary_function(boundary: &FourierBoundary, omega: f64, n_theta: usize, phase: f64) -> Result<Vec<f64>> {
    check_nodes(boundary, n_theta)?;
    let poly = boundary.polygon(VERTICES_PER_NODE * n_theta, phase)?;
    let nodes: Vec<Point2> = poly.vertices().iter().step_by(VERTICES_PER_NODE).copied().collect();
    let comp = PatchComponent::simple(poly);
    let psi: Vec<f64> = nodes.par_iter().map(|&x| component_potential(&comp, x) + 0.5 * omega * x.norm_sq()).collect();
    if let Some(v) = psi.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numerical { message: "boundary function is not finite".into(), residual: *v });
    }
    Ok(psi)
}

/// Projections of `Ψ - mean Ψ` onto `cos(j m θ)`, `j = 1..J`, evaluated on a grid shifted by `phase`.
pub fn vstate_residual_phased(boundary: &FourierBoundary, omega: f64, n_theta: usize, phase: f64) -> Result<Vec<f64>> {
    let psi = boundary_function(boundary, omega, n_theta, phase)?;
    let mean = psi.iter().sum::<f64>() / n_theta as f64;
    let m = boundary.m as f64;
    Ok((1..=boundary.modes())
        .map(|j| {
            2.0 / n_theta as f64
                * psi
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p - mean) * (j as f64 * m * (phase + 2.0 * PI * i as f64 / n_theta as f64)).cos())
                    .sum::<f64>()
        })
        .collect())
}

/// The `J` residual coefficients of the rotating-patch equation on the boundary.
pub fn vstate_residual(boundary: &FourierBoundary, omega: f64, n_theta: usize) -> Result<Vec<f64>> {
    vstate_residual_phased(boundary, omega, n_theta, 0.0)
}

/// Cosine and sine coefficients of `Ψ - mean Ψ` at every frequency `1..=n_theta/2`.
pub fn residual_spectrum(boundary: &FourierBoundary, omega: f64, n_theta: usize) -> Result<Vec<(f64, f64)>> {
    let psi = boundary_function(boundary, omega, n_theta, 0.0)?;
    let mean = psi.iter().sum::<f64>() / n_theta as f64;
    Ok((1..=n_theta / 2)
        .map(|f| {
            let (mut c, mut s) = (0.0, 0.0);
            for (i, p) in psi.iter().enumerate() {
                let th = f as f64 * 2.0 * PI * i as f64 / n_theta as f64;
                c += (p - mean) * th.cos();
                s += (p - mean) * th.sin();
            }
            (2.0 * c / n_theta as f64, 2.0 * s / n_theta as f64)
        })
        .collect())
}

/// Euclidean norm.
pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
