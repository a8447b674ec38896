use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::patch::{band_components, level_curves, min_gradient_on, regularity_threshold, MultiScalePatch, PatchComponent};

/// A step function `w_k = Σ α_i 1_{D_i}` approximating a smooth vorticity,
/// with `D_i` the connected components of bands between regular levels.
#[derive(Debug, Clone, Serialize)]
pub struct StepApproximation {
    pub k: usize,
    /// `c_0 = inf ω₀ < c_1 < … < c_k = sup ω₀`; the interior ones are regular values.
    pub levels: Vec<f64>,
    #[serde(skip)]
    pub terms: MultiScalePatch,
    /// `w_k` at the grid nodes.
    #[serde(skip)]
    pub field: GridField,
    /// `‖w_k - ω₀‖_∞` over the grid nodes in the disc.
    pub sup_error: f64,
    /// `(2/k)‖ω₀‖_∞`.
    pub bound: f64,
    pub satisfied: bool,
}

/// Offsets tried around each nominal level, in units of the band width.
const PERTURBATIONS: [f64; 19] =
    [0.0, 0.05, -0.05, 0.1, -0.1, 0.15, -0.15, 0.2, -0.2, 0.25, -0.25, 0.3, -0.3, 0.35, -0.35, 0.4, -0.4, 0.45, -0.45];

fn is_regular(omega0: &GridField, grad: &crate::grid::VectorField, threshold: f64, level: f64) -> bool {
    let curves = level_curves(omega0, level);
    !curves.is_empty() && curves.iter().all(|c| c.closed && min_gradient_on(&c.points, grad).0 > threshold)
}

/// Slices the range of `ω₀` into `k` bands at regular levels and weights each
/// band component by the midpoint of its band.
///
/// The band touching the unit circle cannot be represented by components
/// strictly inside the disc and is dropped, so `w_k = 0` there.
pub fn step_approximation(omega0: &GridField, k: usize) -> Result<StepApproximation> {
    if k < 2 {
        return Err(Error::Domain(format!("k = {k} must be at least 2")));
    }
    let (lo, hi) = (omega0.inf(), omega0.sup());
    let norm = omega0.sup_abs();
    if !(hi - lo > 1e-12 * norm.max(1.0)) {
        return Err(Error::Approximation { band: 0, reason: "ω₀ is constant and has no regular values".into() });
    }
    let width = (hi - lo) / k as f64;
    let grad = omega0.gradient();
    let threshold = regularity_threshold(omega0);
    let mut levels = vec![lo];
    for i in 1..k {
        let nominal = lo + i as f64 * width;
        let level = PERTURBATIONS
            .iter()
            .map(|d| nominal + d * width)
            .find(|&c| is_regular(omega0, &grad, threshold, c))
            .ok_or_else(|| Error::Approximation {
                band: i,
                reason: format!("no regular level within ±0.45 band widths of {nominal}"),
            })?;
        levels.push(level);
    }
    levels.push(hi);

    let mut terms: Vec<(f64, PatchComponent)> = Vec::new();
    let mut lowest: Vec<PatchComponent> = Vec::new();
    for i in 0..k {
        let lower = (i > 0).then(|| levels[i]);
        let upper = (i + 1 < k).then(|| levels[i + 1]);
        let weight = 0.5 * (levels[i] + levels[i + 1]);
        let comps = band_components(omega0, lower, upper)?;
        let comps: Vec<PatchComponent> = comps.into_iter().filter(|c| c.outer().max_radius() < 1.0).collect();
        if i == 0 {
            lowest = comps.clone();
        }
        if weight != 0.0 {
            terms.extend(comps.into_iter().map(|c| (weight, c)));
        }
    }

    // Node values by band index; the polygons separate nodes exactly by the
    // sign of ω₀ - c, so only the lowest band needs a containment test.
    let mut field = omega0.zeros_like();
    let mut sup_error: f64 = 0.0;
    let n = omega0.n();
    for j in 0..n {
        for i in 0..n {
            if !omega0.inside(i, j) {
                continue;
            }
            let v = omega0.get(i, j);
            let band = levels[1..k].iter().filter(|&&c| c < v).count();
            let w = if band == 0 && !lowest.iter().any(|c| c.contains(omega0.point(i, j))) {
                0.0
            } else {
                0.5 * (levels[band] + levels[band + 1])
            };
            field.set(i, j, w);
            sup_error = sup_error.max((w - v).abs());
        }
    }
    let bound = 2.0 / k as f64 * norm;
    Ok(StepApproximation {
        k,
        levels,
        terms: MultiScalePatch::from_bands(terms),
        field,
        sup_error,
        bound,
        satisfied: sup_error <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn bump(c: Point2, r: f64) -> impl Fn(Point2) -> f64 {
        move |p| (1.0 - p.dist(c).powi(2) / (r * r)).max(0.0).powi(3)
    }

    #[test]
    fn radial_bump_gives_nested_annuli() {
        let w0 = GridField::from_fn(129, bump(Point2::ORIGIN, 0.7)).unwrap();
        let s = step_approximation(&w0, 8).unwrap();
        assert!(s.satisfied, "{} > {}", s.sup_error, s.bound);
        assert_eq!(s.terms.terms().len(), 7);
        let annuli = s.terms.terms().iter().filter(|(_, c)| c.holes().len() == 1).count();
        assert_eq!(annuli, 6);
        assert!(s.levels.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constant_vorticity_has_no_steps() {
        let w0 = GridField::from_fn(65, |_| 1.0).unwrap();
        assert!(matches!(step_approximation(&w0, 4), Err(Error::Approximation { .. })));
    }

    #[test]
    fn two_bumps_split_into_separate_components() {
        let (a, b) = (bump(Point2::new(-0.4, 0.0), 0.3), bump(Point2::new(0.4, 0.1), 0.3));
        let w0 = GridField::from_fn(129, |p| a(p) + b(p)).unwrap();
        let s = step_approximation(&w0, 4).unwrap();
        assert!(s.satisfied);
        let terms = s.terms.terms();
        let left = terms.iter().filter(|(_, c)| c.outer().vertices()[0].x1 < 0.0).count();
        assert_eq!(left, terms.len() - left);
        for k in 0..w0.values().len() {
            let p = w0.point_at(k);
            assert!(terms.iter().filter(|(_, c)| c.contains(p)).count() <= 1, "{p} lies in two components");
        }
    }
}
