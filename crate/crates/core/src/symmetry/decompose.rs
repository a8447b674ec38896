use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::GridField;
use crate::patch::band_components;

/// Number of regular values in the level ladder.
pub const LADDER_LEVELS: usize = 32;
const PROFILE_SAMPLES: usize = 64;
const PROFILE_ANGLES: usize = 64;
/// Gradient level, relative to `max|∇u|`, below which a node counts as flat.
pub const PLATEAU_FRACTION: f64 = 1e-3;

/// One annulus `B_R(z) \ Q_r(z)` on which `u = U(|x - z|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusComponent {
    pub center: Point2,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// `(r, U(r))` on a uniform grid of `[inner_radius, outer_radius]`.
    pub profile: Vec<(f64, f64)>,
    /// `U` strictly decreases along the tabulation.
    pub monotone: bool,
    /// `u ≥ U(inner_radius)` on the core disc, up to the decomposition tolerance.
    pub core_dominates: bool,
    /// Largest circle-fit residual over the level curves assigned to this annulus.
    pub fit_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnularDecomposition {
    pub components: Vec<AnnulusComponent>,
    /// Area of `{0 < u < sup u, |∇u| ≤ tol}`.
    pub residual_measure: f64,
}

/// Algebraic circle fit followed by one Gauss-Newton step on the geometric distance.
/// Returns centre, radius and the largest `| |p - z| - R |`.
pub fn fit_circle(points: &[Point2]) -> Option<(Point2, f64, f64)> {
    if points.len() < 3 {
        return None;
    }
    let mut a = Matrix3::<f64>::zeros();
    let mut b = Vector3::<f64>::zeros();
    for p in points {
        let row = Vector3::new(p.x1, p.x2, 1.0);
        let rhs = -(p.norm_sq());
        a += row * row.transpose();
        b += row * rhs;
    }
    let sol = a.lu().solve(&b)?;
    let mut z = Point2::new(-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = z.norm_sq() - sol[2];
    if !(r2 > 0.0) {
        return None;
    }
    let mut r = r2.sqrt();
    let mut jtj = Matrix3::<f64>::zeros();
    let mut jtr = Vector3::<f64>::zeros();
    for p in points {
        let d = p.dist(z);
        if d == 0.0 {
            continue;
        }
        let jrow = Vector3::new(-(p.x1 - z.x1) / d, -(p.x2 - z.x2) / d, -1.0);
        jtj += jrow * jrow.transpose();
        jtr += jrow * (d - r);
    }
    if let Some(step) = jtj.lu().solve(&(-jtr)) {
        z = Point2::new(z.x1 + step[0], z.x2 + step[1]);
        r += step[2];
    }
    let resid = points.iter().map(|p| (p.dist(z) - r).abs()).fold(0.0, f64::max);
    Some((z, r, resid))
}

struct Cluster {
    circles: Vec<(f64, Point2, f64, f64)>,
    probe: Point2,
    born_with_hole: bool,
    merged_at: Option<f64>,
}

fn radial_mean(u: &GridField, z: Point2, r: f64) -> f64 {
    (0..PROFILE_ANGLES)
        .map(|k| u.sample(z + Point2::polar(r, 2.0 * std::f64::consts::PI * k as f64 / PROFILE_ANGLES as f64)))
        .sum::<f64>()
        / PROFILE_ANGLES as f64
}

/// Splits `{0 < u < sup u}` into concentric annuli carrying radial profiles.
pub fn decompose(u: &GridField, tol: f64) -> Result<AnnularDecomposition> {
    let sup = u.sup();
    let h = u.h();
    let grad = u.gradient();
    let gnorm = |k: usize| grad.v1.values()[k].hypot(grad.v2.values()[k]);
    let residual_measure = (0..u.values().len())
        .filter(|&k| u.mask()[k] && u.values()[k] > 0.0 && u.values()[k] < sup && gnorm(k) <= tol)
        .count() as f64
        * h
        * h;
    if !(sup > 0.0) {
        return Ok(AnnularDecomposition { components: Vec::new(), residual_measure });
    }
    let flat = PLATEAU_FRACTION * (0..u.values().len()).filter(|&k| u.mask()[k]).map(gnorm).fold(0.0, f64::max);
    let mut clusters: Vec<Cluster> = Vec::new();
    for step in (1..=LADDER_LEVELS).rev() {
        let level = sup * step as f64 / (LADDER_LEVELS + 1) as f64;
        let comps = band_components(u, Some(level), None)?;
        for comp in comps {
            let pts = comp.outer().vertices();
            let (z, r, resid) = fit_circle(pts)
                .ok_or_else(|| Error::Decomposition { level, reason: "level curve admits no circle fit".into() })?;
            if resid > tol {
                return Err(Error::Decomposition {
                    level,
                    reason: format!("level curve deviates from a circle by {resid:.3e} near ({:.3}, {:.3})", z.x1, z.x2),
                });
            }
            let inside: Vec<usize> = (0..clusters.len())
                .filter(|&c| clusters[c].merged_at.is_none() && comp.contains(clusters[c].probe))
                .collect();
            let entry = (level, z, r, resid);
            match inside.as_slice() {
                [] => clusters.push(Cluster { circles: vec![entry], probe: pts[0], born_with_hole: !comp.holes().is_empty(), merged_at: None }),
                _ => {
                    let keep = *inside
                        .iter()
                        .max_by(|&&a, &&b| clusters[a].circles.last().unwrap().2.total_cmp(&clusters[b].circles.last().unwrap().2))
                        .unwrap();
                    let kz = clusters[keep].circles.last().unwrap().1;
                    for &c in &inside {
                        if c == keep {
                            continue;
                        }
                        let cz = clusters[c].circles.last().unwrap().1;
                        if cz.dist(kz) > tol.max(2.0 * h) {
                            return Err(Error::Decomposition {
                                level,
                                reason: "two non-concentric super-level components merge".into(),
                            });
                        }
                        clusters[c].merged_at = Some(level);
                    }
                    clusters[keep].circles.push(entry);
                    clusters[keep].probe = pts[0];
                }
            }
        }
    }
    let mut components = Vec::new();
    for cl in &clusters {
        let m = cl.circles.len() as f64;
        let center = Point2::new(
            cl.circles.iter().map(|c| c.1.x1).sum::<f64>() / m,
            cl.circles.iter().map(|c| c.1.x2).sum::<f64>() / m,
        );
        let fit_residual = cl.circles.iter().map(|c| c.3).fold(0.0, f64::max);
        let (top_level, _, top_r, _) = cl.circles[0];
        let last_r = cl.circles.last().unwrap().2;
        let outer_radius = if cl.merged_at.is_some() {
            last_r
        } else {
            let mut r = last_r;
            while r < 2.0 && radial_mean(u, center, r) > 0.0 {
                r += 0.25 * h;
            }
            r
        };
        // A core is present when the innermost circle encloses a plateau or
        // a nested structure; a smooth peak gives inner radius zero.
        let plateau_extent = (0..u.values().len())
            .filter(|&k| u.mask()[k] && u.values()[k] >= top_level && gnorm(k) <= flat)
            .map(|k| u.point_at(k).dist(center))
            .filter(|&d| d <= top_r)
            .fold(0.0, f64::max);
        let inner_radius = if !cl.born_with_hole && plateau_extent <= 3.0 * h { 0.0 } else { top_r };
        let profile: Vec<(f64, f64)> = (0..PROFILE_SAMPLES)
            .map(|k| {
                let r = inner_radius + (outer_radius - inner_radius) * k as f64 / (PROFILE_SAMPLES - 1) as f64;
                (r, radial_mean(u, center, r))
            })
            .collect();
        let monotone = profile.windows(2).all(|w| w[1].1 < w[0].1 || w[1].1 == 0.0 && w[0].1 == 0.0);
        let core_value = profile[0].1;
        let core_dominates = (0..u.values().len())
            .filter(|&k| u.mask()[k] && u.point_at(k).dist(center) < inner_radius)
            .all(|k| u.values()[k] >= core_value - tol);
        components.push(AnnulusComponent {
            center,
            inner_radius,
            outer_radius,
            profile,
            monotone,
            core_dominates,
            fit_residual,
        });
    }
    Ok(AnnularDecomposition { components, residual_measure })
}
