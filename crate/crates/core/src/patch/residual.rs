use serde::Serialize;

use super::contour::{level_curves, min_gradient_on};
use super::polygon::JordanPolygon;
use super::spec::{MultiScalePatch, PatchSpec};
use crate::disc_potential::{component_potential, stream_field};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::GridField;

/// Deviation of a boundary functional from its mean along one curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveResidual {
    pub mean: f64,
    pub max_deviation: f64,
    pub samples: usize,
}

impl CurveResidual {
    fn from_values(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
        let max_deviation = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        CurveResidual { mean, max_deviation, samples: values.len() }
    }
}

/// One entry per Jordan curve, in the order outer curve then holes, component by component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub curves: Vec<CurveResidual>,
    pub max_deviation: f64,
}

impl ResidualReport {
    fn new(curves: Vec<CurveResidual>) -> Self {
        let max_deviation = curves.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
        ResidualReport { curves, max_deviation }
    }
}

/// `𝒢[1_D]` sampled along every boundary curve of a patch, reusable across angular velocities.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    curves: Vec<Vec<(Point2, f64)>>,
}

impl BoundarySamples {
    pub fn new(patch: &PatchSpec, samples_per_edge: usize) -> Result<Self> {
        Self::weighted(&MultiScalePatch::from_patch(patch), samples_per_edge)
    }

    /// `𝒢[Σ α_i 1_{D_i}]` along every boundary curve of a weighted patch.
    pub fn weighted(patch: &MultiScalePatch, samples_per_edge: usize) -> Result<Self> {
        if samples_per_edge == 0 {
            return Err(Error::Precondition("samples_per_edge must be at least 1".into()));
        }
        let mut curves = Vec::new();
        for (_, comp) in patch.terms() {
            for (curve, _) in comp.signed_curves() {
                let mut row = Vec::new();
                for x in curve.samples(samples_per_edge) {
                    let v: f64 = patch.terms().iter().map(|(a, c)| a * component_potential(c, x)).sum();
                    if !v.is_finite() {
                        return Err(Error::Numerical { message: format!("potential at {x} is not finite"), residual: f64::NAN });
                    }
                    row.push((x, v));
                }
                curves.push(row);
            }
        }
        Ok(BoundarySamples { curves })
    }

    pub fn curves(&self) -> &[Vec<(Point2, f64)>] {
        &self.curves
    }

    /// Residual of `𝒢[1_D] + (Ω/2)|x|²` along each curve.
    pub fn residual(&self, omega: f64) -> ResidualReport {
        let curves = self
            .curves
            .iter()
            .map(|row| {
                let vals: Vec<f64> = row.iter().map(|(x, v)| v + 0.5 * omega * x.norm_sq()).collect();
                CurveResidual::from_values(&vals)
            })
            .collect();
        ResidualReport::new(curves)
    }
}

/// How far `𝒢[1_D] + (Ω/2)|x|²` is from being constant on each boundary curve.
pub fn rotating_residual(patch: &PatchSpec, omega: f64, samples_per_edge: usize) -> Result<ResidualReport> {
    Ok(BoundarySamples::new(patch, samples_per_edge)?.residual(omega))
}

/// Multiple of the within-cell gradient drift `h·max|D²ω₀|` that `|∇ω₀|`
/// must exceed on a regular level curve.
pub const REGULARITY_FACTOR: f64 = 4.0;

/// Minimum `|∇ω₀|` demanded on a level curve.
pub fn regularity_threshold(omega0: &GridField) -> f64 {
    let n = omega0.n();
    let h = omega0.h();
    let mut d2: f64 = 0.0;
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            if !(omega0.inside(i - 1, j) && omega0.inside(i + 1, j) && omega0.inside(i, j - 1) && omega0.inside(i, j + 1)) {
                continue;
            }
            let c = omega0.get(i, j);
            let xx = omega0.get(i + 1, j) - 2.0 * c + omega0.get(i - 1, j);
            let yy = omega0.get(i, j + 1) - 2.0 * c + omega0.get(i, j - 1);
            d2 = d2.max(xx.abs()).max(yy.abs());
        }
    }
    REGULARITY_FACTOR * h * d2 / (h * h)
}

/// Residual of `𝒢[ω₀] + (Ω/2)|x|²` along each connected component of `{ω₀ = level}`.
pub fn smooth_residual(omega0: &GridField, omega: f64, level: f64) -> Result<ResidualReport> {
    let curves = level_curves(omega0, level);
    let grad = omega0.gradient();
    let threshold = regularity_threshold(omega0);
    if curves.is_empty() {
        return Err(Error::Irregular { level, gradient: 0.0, point: Point2::ORIGIN });
    }
    for c in &curves {
        let (g, at) = min_gradient_on(&c.points, &grad);
        if g <= threshold {
            return Err(Error::Irregular { level, gradient: g, point: at });
        }
    }
    let psi = stream_field(omega0)?;
    let report = curves
        .iter()
        .map(|c| {
            let vals: Vec<f64> = c.points.iter().map(|&x| psi.sample(x) + 0.5 * omega * x.norm_sq()).collect();
            CurveResidual::from_values(&vals)
        })
        .collect();
    Ok(ResidualReport::new(report))
}

const GAUSS_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Range of `|x|` over a polygonal curve and its arclength-mean.
fn radial_profile(curve: &JordanPolygon) -> (f64, f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let (mut integral, mut length) = (0.0, 0.0);
    for (a, b) in curve.edges() {
        let len = a.dist(b);
        hi = hi.max(a.norm());
        lo = lo.min(super::polygon::segment_distance(Point2::ORIGIN, a, b));
        for (t, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let p = a + (0.5 * (1.0 + t)) * (b - a);
            integral += 0.5 * w * len * p.norm();
        }
        length += len;
    }
    (lo, hi, integral / length)
}

fn curve_radiality(curve: &JordanPolygon) -> (f64, f64) {
    let (lo, hi, mean) = radial_profile(curve);
    ((hi - mean).max(mean - lo), mean)
}

/// Largest distance of a boundary point from the centred circle through the
/// mean radius of its curve; zero exactly for unions of centred discs and annuli.
pub fn radiality_measure(patch: &PatchSpec) -> f64 {
    patch.boundary_curves().map(|(c, _)| curve_radiality(c).0).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchClass {
    Disc,
    Annulus,
    UnionOfRadial,
    NonRadial,
}

impl std::fmt::Display for PatchClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PatchClass::Disc => "disc",
            PatchClass::Annulus => "annulus",
            PatchClass::UnionOfRadial => "union-of-radial",
            PatchClass::NonRadial => "non-radial",
        })
    }
}

/// Relative radiality below which a curve counts as a centred circle.
pub const RADIAL_TOLERANCE: f64 = 5e-3;

pub fn classify(patch: &PatchSpec) -> PatchClass {
    classify_with_tolerance(patch, RADIAL_TOLERANCE)
}

pub fn classify_with_tolerance(patch: &PatchSpec, tolerance: f64) -> PatchClass {
    let radial = patch.boundary_curves().all(|(c, _)| {
        let (dev, mean) = curve_radiality(c);
        dev <= tolerance * mean
    });
    let comps = patch.components();
    if !radial || comps.is_empty() {
        return PatchClass::NonRadial;
    }
    match comps {
        [c] if c.holes().is_empty() => PatchClass::Disc,
        [c] if c.holes().len() == 1 => PatchClass::Annulus,
        [_] => PatchClass::NonRadial,
        _ => PatchClass::UnionOfRadial,
    }
}
