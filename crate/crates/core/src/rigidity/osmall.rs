use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use super::WorkingField;
use crate::csts::{csts_field, dirichlet_energy, rotated_slices, SliceProfile, DEFAULT_LEVELS};
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::patch::{level_curves, min_gradient_on, regularity_threshold, JordanPolygon, PatchSpec};

/// Required shrink of `q(t)/t` across three dyadic halvings of `t`.
pub const DECAY_FACTOR: f64 = 0.7;

/// Finite-sample reading of `q(t)` against `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OVerdict {
    #[serde(rename = "o(t)")]
    OSmall,
    #[serde(rename = "Θ(t)")]
    Theta,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for OVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OVerdict::OSmall => "o(t)",
            OVerdict::Theta => "Θ(t)",
            OVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Thresholds of the verdict rule, in the units of `q(t)/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OCriteria {
    /// Resolution of the reconstruction: ratios below it cannot be told from zero.
    pub noise_floor: f64,
    /// Ratios above this at every `t` read as linear growth.
    pub ratio_floor: f64,
}

/// `q(t)` sampled on a decreasing grid of `t`, with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OSmallReport {
    pub t_grid: Vec<f64>,
    pub q: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Least-squares slope of `ln|q|` against `ln t`; `NaN` when too few samples are non-zero.
    pub slope: f64,
    pub criteria: OCriteria,
    pub verdict: OVerdict,
}

impl OSmallReport {
    pub fn new(t_grid: Vec<f64>, q: Vec<f64>, criteria: OCriteria) -> Result<Self> {
        check_t_grid(&t_grid)?;
        if q.len() != t_grid.len() {
            return Err(Error::Domain(format!("{} values for {} times", q.len(), t_grid.len())));
        }
        let ratios: Vec<f64> = q.iter().zip(&t_grid).map(|(q, t)| q / t).collect();
        let slope = log_log_slope(&t_grid, &q);
        let verdict = judge(&ratios, &criteria);
        Ok(OSmallReport { t_grid, q, ratios, slope, criteria, verdict })
    }

    /// Largest `|q(t)|` on the grid.
    pub fn max_abs_q(&self) -> f64 {
        self.q.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rows `t,q,ratio` with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,q,ratio")?;
        for ((t, q), r) in self.t_grid.iter().zip(&self.q).zip(&self.ratios) {
            writeln!(w, "{t:e},{q:e},{r:e}")?;
        }
        Ok(())
    }
}

fn judge(ratios: &[f64], c: &OCriteria) -> OVerdict {
    let r: Vec<f64> = ratios.iter().map(|v| v.abs()).collect();
    if r.iter().all(|&v| v <= c.noise_floor) {
        return OVerdict::OSmall;
    }
    let k = r.len();
    let decaying = (k.saturating_sub(3).max(3)..k).all(|i| r[i] <= DECAY_FACTOR * r[i - 3]);
    let smallest = r.iter().copied().fold(f64::INFINITY, f64::min);
    if decaying && smallest < c.ratio_floor {
        OVerdict::OSmall
    } else if r.iter().all(|&v| v > c.ratio_floor) {
        OVerdict::Theta
    } else {
        OVerdict::Inconclusive
    }
}

fn log_log_slope(t: &[f64], q: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t.iter().zip(q).filter(|(_, q)| q.abs() > 0.0).map(|(t, q)| (t.ln(), q.abs().ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    if den == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}

pub(crate) fn check_t_grid(t: &[f64]) -> Result<()> {
    if t.len() < 5 {
        return Err(Error::Domain(format!("the t-grid needs at least 5 samples, got {}", t.len())));
    }
    if t.iter().any(|&v| !(v > 0.0 && v.is_finite())) || t.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("the t-grid must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// `t = 2^{-from}, …, 2^{-to}`.
pub fn dyadic_t_grid(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-k)).collect()
}

/// Drops the times where the sup-bound `L·R·t` (`R = 1`) is within three
/// reconstruction tolerances of zero, so that `q(t)` is not pure noise.
pub fn clamp_t_grid(t_grid: &[f64], lipschitz: f64, reconstruction_tolerance: f64) -> Result<Vec<f64>> {
    let kept: Vec<f64> = t_grid.iter().copied().filter(|&t| lipschitz * t >= 3.0 * reconstruction_tolerance).collect();
    check_t_grid(&kept)?;
    Ok(kept)
}

/// Reconstruction noise of `(E(u) - E(u^t))/t`, in units of `h²·E(u)`.
pub const ENERGY_NOISE: f64 = 1.0;
/// Floor of `(E(u) - E(u^t))/t` for the linear-growth reading, in units of `E(u)`.
pub const ENERGY_RATIO_FLOOR: f64 = 5e-4;

/// Verdict thresholds for the energy deficit of a field with energy `energy` on a grid of spacing `h`.
pub fn energy_criteria(energy: f64, h: f64) -> OCriteria {
    OCriteria { noise_floor: ENERGY_NOISE * h * h * energy, ratio_floor: ENERGY_RATIO_FLOOR * energy }
}

/// `E(u) - E(u^t)` along `direction`, on the working field.
///
/// A negative value beyond round-off would contradict the energy inequality
/// of the rearrangement and is reported as a numerical error.
pub fn energy_stationarity(working: &WorkingField, direction: f64, t_grid: &[f64]) -> Result<OSmallReport> {
    let (field, _) = working.nonnegative();
    let v = rotated_slices(&field, direction);
    let criteria = energy_criteria(dirichlet_energy(&v), v.h());
    energy_stationarity_with(&field, direction, t_grid, criteria)
}

/// [`energy_stationarity`] on a bare non-negative field with explicit thresholds.
pub fn energy_stationarity_with(u: &GridField, direction: f64, t_grid: &[f64], criteria: OCriteria) -> Result<OSmallReport> {
    check_t_grid(t_grid)?;
    if let Some(v) = u.values().iter().find(|&&v| v < 0.0) {
        return Err(Error::Precondition(format!("field value {v} is negative")));
    }
    // Energies are compared in the rotated frame, which is a single resampling.
    let v = rotated_slices(u, direction);
    let e0 = dirichlet_energy(&v);
    let q = t_grid
        .par_iter()
        .map(|&t| Ok(e0 - dirichlet_energy(&csts_field(&v, t)?)))
        .collect::<Result<Vec<f64>>>()?;
    // Sampling can raise the discrete energy by up to the reconstruction noise.
    let round_off = (criteria.noise_floor * t_grid[0]).max(1e-10);
    if let Some((t, q)) = t_grid.iter().zip(&q).find(|(_, q)| **q < -round_off) {
        return Err(Error::Numerical {
            message: format!("energy increased under symmetrization at t = {t}"),
            residual: -q,
        });
    }
    OSmallReport::new(t_grid.to_vec(), q, criteria)
}

/// Per-row pieces of a region, one list of intervals for every grid row.
type RowRegions = Vec<Vec<(f64, f64)>>;

/// `Σ_rows h · f(row integrals)` for every `t`, with layer-cake row integrals.
fn row_quantity(u: &GridField, regions: &RowRegions, t_grid: &[f64], f: impl Fn(&SliceProfile, &[(f64, f64)], f64) -> f64 + Sync) -> Result<Vec<f64>> {
    let n = u.n();
    let xs: Vec<f64> = (0..n).map(|i| u.coord(i)).collect();
    let rows: Vec<(SliceProfile, &Vec<(f64, f64)>)> = (0..n)
        .filter(|&j| !regions[j].is_empty())
        .map(|j| Ok((SliceProfile::new(xs.clone(), u.row(j).to_vec(), DEFAULT_LEVELS)?, &regions[j])))
        .collect::<Result<_>>()?;
    let h = u.h();
    Ok(t_grid
        .par_iter()
        .map(|&t| rows.iter().map(|(p, r)| f(p, r, t)).sum::<f64>() * h)
        .collect())
}

fn check_nonnegative(u: &GridField) -> Result<()> {
    match u.values().iter().find(|&&v| !(v >= 0.0)) {
        Some(v) => Err(Error::Precondition(format!("field value {v} is negative"))),
        None => Ok(()),
    }
}

/// Resolution of the layer-cake integrals relative to `|V|·sup u`.
pub const LEMMA_NOISE: f64 = 1e-10;
/// Floor of `q(t)/t` for the linear-growth reading, relative to `|V|·Lip(u)`.
pub const LEMMA_RATIO_FLOOR: f64 = 1e-4;

fn lemma_criteria(u: &GridField, area: f64) -> OCriteria {
    OCriteria {
        noise_floor: LEMMA_NOISE * area * u.sup().max(f64::MIN_POSITIVE),
        ratio_floor: LEMMA_RATIO_FLOOR * area * u.discrete_lipschitz(),
    }
}

/// `∫_V |u^t - u|` over the plateau `V = {|u - c| ≤ 1e-9·c}`, symmetrizing along `x₁`.
///
/// Row integrals are taken over the piecewise-linear slices by the layer-cake
/// formula, so `q(t)` is free of the node-sampling error of the flowed field.
pub fn lemma_key1_check(u: &GridField, c: f64, t_grid: &[f64]) -> Result<OSmallReport> {
    check_t_grid(t_grid)?;
    check_nonnegative(u)?;
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("plateau level {c} must be positive")));
    }
    let tol = 1e-9 * c;
    let n = u.n();
    let on = |i: usize, j: usize| u.inside(i, j) && (u.get(i, j) - c).abs() <= tol;
    let mut regions: RowRegions = vec![Vec::new(); n];
    let mut nodes = 0usize;
    for (j, region) in regions.iter_mut().enumerate() {
        let mut i = 0;
        while i < n {
            if !on(i, j) {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < n && on(i + 1, j) {
                i += 1;
            }
            nodes += i - start + 1;
            if i > start {
                region.push((u.coord(start), u.coord(i)));
            }
            i += 1;
        }
    }
    if nodes == 0 {
        return Err(Error::Precondition(format!("no plateau at level {c}")));
    }
    let h = u.h();
    let area: f64 = regions.iter().flatten().map(|(a, b)| b - a).sum::<f64>() * h;
    let q = row_quantity(u, &regions, t_grid, |p, r, t| p.region_deviation(r, t, c))?;
    OSmallReport::new(t_grid.to_vec(), q, lemma_criteria(u, area.max(h * h)))
}

/// Intervals of `{x₁ : (x₁, y) inside curve}`.
fn polygon_row(curve: &JordanPolygon, y: f64) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = curve
        .edges()
        .filter(|(a, b)| (a.x2 <= y) != (b.x2 <= y))
        .map(|(a, b)| a.x1 + (y - a.x2) / (b.x2 - a.x2) * (b.x1 - a.x1))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.chunks_exact(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
}

/// `∫_{int(curve)} (u^t - u)` for a level curve `{u = c}` bounding `{u > c}`.
///
/// Regular values above `c` are required: the level curves of `u` at a few
/// levels just above `c` must carry a gradient above the regularity threshold.
pub fn lemma_key2_check(u: &GridField, curve: &JordanPolygon, c: f64, t_grid: &[f64]) -> Result<OSmallReport> {
    check_t_grid(t_grid)?;
    check_nonnegative(u)?;
    let grad = u.gradient();
    let threshold = regularity_threshold(u);
    let top = u.sup();
    let mut regular = 0;
    for k in 1..=4 {
        let gamma = c + (top - c) * 0.05 * k as f64;
        for lc in level_curves(u, gamma) {
            if lc.closed && curve.contains(lc.points[0]) && min_gradient_on(&lc.points, &grad).0 > threshold {
                regular += 1;
                break;
            }
        }
    }
    if regular == 0 {
        return Err(Error::Irregular { level: c, gradient: 0.0, point: curve.vertices()[0] });
    }
    let h = u.h();
    let lip = u.discrete_lipschitz();
    let on_curve = 2.0 * h * lip + 1e-12;
    if let Some(p) = curve.samples(2).into_iter().find(|&p| (u.sample(p) - c).abs() > on_curve) {
        return Err(Error::Precondition(format!("u = {} at {p}, not the curve level {c}", u.sample(p))));
    }
    let n = u.n();
    if let Some(k) = (0..n * n).find(|&k| u.mask()[k] && curve.contains(u.point_at(k)) && u.values()[k] < c - on_curve) {
        return Err(Error::Precondition(format!("u = {} < {c} inside the curve at {}", u.values()[k], u.point_at(k))));
    }
    let regions: RowRegions = (0..n).map(|j| polygon_row(curve, u.coord(j))).collect();
    let area: f64 = regions.iter().flatten().map(|(a, b)| b - a).sum::<f64>() * h;
    if area == 0.0 {
        return Err(Error::Precondition("the curve encloses no grid row".into()));
    }
    let q = row_quantity(u, &regions, t_grid, |p, r, t| p.region_change(r, t))?;
    OSmallReport::new(t_grid.to_vec(), q, lemma_criteria(u, area))
}

/// `∫_V |u^t - u|` over the nodes inside `curve`, the companion of [`lemma_key2_check`].
pub fn absolute_change_inside(u: &GridField, curve: &JordanPolygon, t: f64) -> Result<f64> {
    let ut = csts_field(u, t)?;
    let h2 = u.h() * u.h();
    Ok((0..u.values().len())
        .filter(|&k| u.mask()[k] && curve.contains(u.point_at(k)))
        .map(|k| (ut.values()[k] - u.values()[k]).abs())
        .sum::<f64>()
        * h2)
}

/// Difference between `∫_D (u^t - u)` evaluated directly and as the sum over
/// components of the outer region minus its holes.
pub fn split_decomposition_integral(u: &GridField, patch: &PatchSpec, t: f64) -> Result<f64> {
    let diff = if t == 0.0 { u.zeros_like() } else { csts_field(u, t)?.zip_map(u, |a, b| a - b)? };
    let n = u.n();
    let h = u.h();
    let weigh = |cov: &[f64]| -> f64 { cov.iter().zip(diff.values()).map(|(c, d)| c * d).sum::<f64>() * h * h };
    let direct = weigh(&crate::patch::coverage(patch.boundary_curves(), n, h));
    let mut split = 0.0;
    for comp in patch.components() {
        split += weigh(&crate::patch::coverage(std::iter::once((comp.outer(), 1.0)), n, h));
        for hole in comp.holes() {
            split -= weigh(&crate::patch::coverage(std::iter::once((hole, 1.0)), n, h));
        }
    }
    Ok((direct - split).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::patch::PatchComponent;
    use crate::rigidity::{build_relative_stream, RotatingPatchProblem};

    fn criteria(noise: f64, floor: f64) -> OCriteria {
        OCriteria { noise_floor: noise, ratio_floor: floor }
    }

    fn cone(n: usize, z: f64) -> GridField {
        let c = Point2::new(z, 0.0);
        GridField::from_fn(n, |p| ((0.6 - p.dist(c)) / 0.3).clamp(0.0, 1.0)).unwrap()
    }

    fn decays_by_three_steps(r: &[f64]) -> bool {
        (3..r.len()).all(|i| r[i].abs() <= DECAY_FACTOR * r[i - 3].abs())
    }

    #[test]
    fn verdict_rule() {
        let t = dyadic_t_grid(3, 10);
        let linear: Vec<f64> = t.iter().map(|t| 0.5 * t).collect();
        let quadratic: Vec<f64> = t.iter().map(|t| t * t).collect();
        let zero = vec![1e-20; t.len()];
        assert_eq!(OSmallReport::new(t.clone(), linear, criteria(1e-9, 1e-3)).unwrap().verdict, OVerdict::Theta);
        let r = OSmallReport::new(t.clone(), quadratic, criteria(1e-9, 1e-2)).unwrap();
        assert_eq!(r.verdict, OVerdict::OSmall);
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert_eq!(OSmallReport::new(t.clone(), zero, criteria(1e-9, 1e-3)).unwrap().verdict, OVerdict::OSmall);
        let mixed: Vec<f64> = t.iter().enumerate().map(|(k, t)| if k % 2 == 0 { *t } else { t * t }).collect();
        assert_eq!(OSmallReport::new(t, mixed, criteria(1e-9, 1e-2)).unwrap().verdict, OVerdict::Inconclusive);
    }

    #[test]
    fn t_grid_is_validated() {
        let q = vec![0.0; 4];
        assert!(OSmallReport::new(dyadic_t_grid(3, 6), q, criteria(0.0, 1.0)).is_err());
        assert!(OSmallReport::new(vec![0.1, 0.2, 0.05, 0.01, 0.001], vec![0.0; 5], criteria(0.0, 1.0)).is_err());
        assert_eq!(clamp_t_grid(&dyadic_t_grid(3, 10), 1.0, 1e-3).unwrap(), dyadic_t_grid(3, 8));
        assert!(clamp_t_grid(&dyadic_t_grid(3, 10), 1.0, 0.05).is_err());
    }

    #[test]
    fn csv_has_a_row_per_time() {
        let t = dyadic_t_grid(3, 7);
        let r = OSmallReport::new(t.clone(), t.clone(), criteria(0.0, 0.1)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("t,q,ratio\n1.25e-1,1.25e-1,1e0"));
    }

    #[test]
    fn centred_cone_plateau_is_a_fixed_point() {
        let r = lemma_key1_check(&cone(129, 0.0), 1.0, &dyadic_t_grid(3, 10)).unwrap();
        assert!(r.q.iter().all(|&q| q.abs() <= 1e-13), "{:?}", r.q);
        assert_eq!(r.verdict, OVerdict::OSmall);
    }

    #[test]
    fn off_centre_cone_plateau_change_is_o_of_t() {
        let r = lemma_key1_check(&cone(129, 0.2), 1.0, &dyadic_t_grid(3, 10)).unwrap();
        assert_eq!(r.verdict, OVerdict::OSmall, "{:?}", r.ratios);
        assert!(decays_by_three_steps(&r.ratios), "{:?}", r.ratios);
        assert!(r.slope > 1.5, "slope {}", r.slope);
    }

    #[test]
    fn plateau_above_the_sup_is_refused() {
        let e = lemma_key1_check(&cone(65, 0.0), 2.0, &dyadic_t_grid(3, 8)).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn radial_level_circle_gives_zero() {
        let u = GridField::from_fn(129, |p| (1.0 - p.norm_sq()).max(0.0)).unwrap();
        let c = 1.0 - 0.25;
        let circle = JordanPolygon::circle(Point2::ORIGIN, 0.5, 512).unwrap();
        let r = lemma_key2_check(&u, &circle, c, &dyadic_t_grid(3, 10)).unwrap();
        assert_eq!(r.verdict, OVerdict::OSmall);
        assert!(r.max_abs_q() <= r.criteria.noise_floor * 1e-3, "{:?}", r.q);
    }

    #[test]
    fn constant_field_has_no_regular_values() {
        let u = GridField::from_fn(65, |_| 1.0).unwrap();
        let circle = JordanPolygon::circle(Point2::ORIGIN, 0.5, 64).unwrap();
        assert!(matches!(lemma_key2_check(&u, &circle, 1.0, &dyadic_t_grid(3, 8)), Err(Error::Irregular { .. })));
    }

    #[test]
    fn off_centre_stream_level_curve_change_is_o_of_t() {
        let off = PatchSpec::single(PatchComponent::disc(Point2::new(0.25, 0.0), 0.2, 1024).unwrap()).unwrap();
        let u = build_relative_stream(&RotatingPatchProblem::new(&off, 0.0).unwrap(), 129).unwrap().field;
        let level = 0.6 * u.sup();
        let curve = level_curves(&u, level).into_iter().find(|c| c.closed).unwrap().to_polygon().unwrap();
        let t = dyadic_t_grid(3, 10);
        let r = lemma_key2_check(&u, &curve, level, &t).unwrap();
        assert_eq!(r.verdict, OVerdict::OSmall, "{:?}", r.ratios);
        assert!(decays_by_three_steps(&r.ratios), "{:?}", r.ratios);
        // Mass moves inside V: the signed change is much smaller than the absolute one.
        let abs = absolute_change_inside(&u, &curve, t[0]).unwrap();
        assert!(r.q[0].abs() < 0.1 * abs, "{} vs {abs}", r.q[0]);
    }

    #[test]
    fn energy_of_radial_stream_is_stationary_in_every_direction() {
        let disc = PatchSpec::single(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048).unwrap()).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&disc, 0.0).unwrap(), 129).unwrap();
        for dir in [0.0, 0.3, std::f64::consts::FRAC_PI_2] {
            let r = energy_stationarity(&w, dir, &dyadic_t_grid(3, 10)).unwrap();
            assert_eq!(r.verdict, OVerdict::OSmall, "direction {dir}: {:?}", r.ratios);
        }
    }

    #[test]
    fn ellipse_energy_drops_linearly_off_its_axes() {
        let ell = PatchSpec::single(PatchComponent::simple(JordanPolygon::ellipse(Point2::ORIGIN, 0.35, 0.25, 0.0, 1024).unwrap())).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&ell, 0.0).unwrap(), 129).unwrap();
        let t = dyadic_t_grid(3, 10);
        let r = energy_stationarity(&w, std::f64::consts::FRAC_PI_4, &t).unwrap();
        assert_eq!(r.verdict, OVerdict::Theta, "{:?}", r.ratios);
        assert!((r.slope - 1.0).abs() < 0.1, "slope {}", r.slope);
        // Along its own axis the ellipse is already Steiner symmetric.
        let axis = energy_stationarity(&w, 0.0, &t).unwrap();
        assert_eq!(axis.verdict, OVerdict::OSmall, "{:?}", axis.ratios);
    }

    #[test]
    fn off_centre_disc_is_stationary_only_across_its_mirror_axis() {
        let off = PatchSpec::single(PatchComponent::disc(Point2::new(0.25, 0.0), 0.2, 1024).unwrap()).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&off, -0.5).unwrap(), 129).unwrap();
        let t = dyadic_t_grid(3, 10);
        assert_eq!(energy_stationarity(&w, std::f64::consts::FRAC_PI_2, &t).unwrap().verdict, OVerdict::OSmall);
        assert_eq!(energy_stationarity(&w, 0.0, &t).unwrap().verdict, OVerdict::Theta);
    }

    #[test]
    fn energy_refuses_negative_fields() {
        let u = GridField::from_fn(65, |p| p.x1).unwrap();
        let e = energy_stationarity_with(&u, 0.0, &dyadic_t_grid(3, 8), criteria(0.0, 1.0)).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn split_decomposition_matches_the_direct_integral() {
        let ann = PatchSpec::single(PatchComponent::annulus(Point2::new(0.05, 0.0), 0.2, 0.45, 512).unwrap()).unwrap();
        let c = Point2::new(0.3, 0.1);
        let u = GridField::from_fn(129, |p| (0.7 - p.dist(c)).max(0.0)).unwrap();
        assert_eq!(split_decomposition_integral(&u, &ann, 0.0).unwrap(), 0.0);
        assert!(split_decomposition_integral(&u, &ann, 0.1).unwrap() <= 1e-10);
        let radial = GridField::from_fn(129, |p| (0.7 - p.norm()).max(0.0)).unwrap();
        let centred = PatchSpec::single(PatchComponent::annulus(Point2::ORIGIN, 0.2, 0.45, 512).unwrap()).unwrap();
        assert!(split_decomposition_integral(&radial, &centred, 0.1).unwrap() <= 1e-10);
    }
}
