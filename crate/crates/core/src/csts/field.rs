use super::interval::flow_pieces;
use crate::error::{Error, Result};
use crate::grid::GridField;

/// Default minimum number of levels per row.
pub const DEFAULT_LEVELS: usize = 256;

/// One horizontal slice `x₁ ↦ u(x₁, x₂)` of a field, read as its piecewise-linear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceProfile {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub levels: usize,
}

/// Components of `{p > c}`, open intervals with endpoints in closed form.
pub(super) fn superlevel_open(xs: &[f64], p: &[f64], c: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = (p[0] > c).then_some(xs[0]);
    for i in 0..xs.len() - 1 {
        let (a, b) = (p[i], p[i + 1]);
        let h = xs[i + 1] - xs[i];
        if a > c {
            if b <= c {
                let end = xs[i] + (a - c) / (a - b) * h;
                out.push((start.take().unwrap_or(xs[i]), end));
            }
        } else if b > c {
            start = Some(xs[i] + (c - a) / (b - a) * h);
        }
    }
    if let Some(s) = start {
        out.push((s, xs[xs.len() - 1]));
    }
    out
}

/// Components of `{p ≥ c}`, closed and possibly single points.
fn superlevel_closed(xs: &[f64], p: &[f64], c: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = (p[0] >= c).then_some(xs[0]);
    for i in 0..xs.len() - 1 {
        let (a, b) = (p[i], p[i + 1]);
        let h = xs[i + 1] - xs[i];
        if a >= c {
            if b < c {
                let end = xs[i] + (a - c) / (a - b) * h;
                out.push((start.take().unwrap_or(xs[i]), end));
            }
        } else if b >= c {
            start = Some(if b == c { xs[i + 1] } else { xs[i] + (c - a) / (b - a) * h });
        }
    }
    if let Some(s) = start {
        out.push((s, xs[xs.len() - 1]));
    }
    out
}

fn levels_for(values: &[f64], min_levels: usize) -> Vec<f64> {
    let mut levels: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    levels.push(0.0);
    let top = levels.iter().copied().fold(0.0, f64::max);
    if top > 0.0 && levels.len() < min_levels {
        for k in 1..min_levels {
            levels.push(top * k as f64 / min_levels as f64);
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

fn locate(pieces: &[(f64, f64)], x: f64) -> Option<(f64, f64)> {
    pieces.iter().copied().find(|&(a, b)| a < x && x < b)
}

impl SliceProfile {
    pub fn new(xs: Vec<f64>, values: Vec<f64>, levels: usize) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::Precondition("slice needs matching abscissae and values, at least two".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("slice value {v} is negative")));
        }
        Ok(SliceProfile { xs, values, levels })
    }

    /// Values of `T_t` of this slice at its own abscissae.
    pub fn flow(&self, t: f64) -> Vec<f64> {
        if t == 0.0 || self.values.iter().all(|&v| v == 0.0) {
            return self.values.clone();
        }
        let levels = levels_for(&self.values, self.levels);
        let m = levels.len();
        let open: Vec<Vec<(f64, f64)>> =
            levels.iter().map(|&c| flow_pieces(&superlevel_open(&self.xs, &self.values, c), t, None)).collect();
        let closed: Vec<Vec<(f64, f64)>> = levels
            .iter()
            .map(|&c| if c > 0.0 { flow_pieces(&superlevel_closed(&self.xs, &self.values, c), t, None) } else { Vec::new() })
            .collect();
        self.xs
            .iter()
            .map(|&x| {
                if locate(&open[0], x).is_none() {
                    return 0.0;
                }
                // The flowed open sets are nested, so the highest level whose
                // set contains x is found by bisection.
                let (mut lo, mut hi) = (0usize, m - 1);
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if locate(&open[mid], x).is_some() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (c0, c1) = (levels[lo], levels[lo + 1]);
                let (a, b) = locate(&open[lo], x).unwrap_or((x, x));
                let tops = &closed[lo + 1];
                if tops.iter().any(|&(p, q)| p <= x && x <= q) {
                    return c1;
                }
                let (mut left, mut left_v) = (a, c0);
                let (mut right, mut right_v) = (b, c0);
                for &(p, q) in tops {
                    if q < x && q > left {
                        left = q;
                        left_v = c1;
                    }
                    if p > x && p < right {
                        right = p;
                        right_v = c1;
                    }
                }
                let span = right - left;
                let v = if span > 0.0 { left_v + (right_v - left_v) * (x - left) / span } else { c0 };
                v.clamp(c0, c1)
            })
            .collect()
    }
}

pub(super) fn overlap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for &(p, q) in a {
        for &(r, s) in b {
            total += (q.min(s) - p.max(r)).max(0.0);
        }
    }
    total
}

/// `∫_a^b f` for a continuous piecewise-linear `f` whose kinks are unknown:
/// panels are halved until `f` is affine on them or narrower than `min_width`.
fn integrate_piecewise_linear(f: &dyn Fn(f64) -> f64, (a, fa): (f64, f64), (b, fb): (f64, f64), tol: f64, min_width: f64) -> f64 {
    let probes = [0.25, 0.5, 0.75].map(|w| {
        let x = a + w * (b - a);
        (x, f(x), fa + w * (fb - fa))
    });
    let affine = probes.iter().all(|&(_, v, lin)| (v - lin).abs() <= tol);
    if affine || b - a <= min_width {
        return 0.5 * (fa + fb) * (b - a);
    }
    let mid = (probes[1].0, probes[1].1);
    integrate_piecewise_linear(f, (a, fa), mid, tol, min_width) + integrate_piecewise_linear(f, mid, (b, fb), tol, min_width)
}

/// Which superlevel set stands for level `s`: `{p > s}` is right-continuous in
/// `s`, `{p ≥ s}` left-continuous, and plateaus make the two differ.
#[derive(Clone, Copy)]
enum Side {
    Open,
    Closed,
}

impl SliceProfile {
    fn measure(&self, region: &[(f64, f64)], t: f64, s: f64, side: Side) -> f64 {
        let pieces = match side {
            Side::Open => superlevel_open(&self.xs, &self.values, s),
            Side::Closed => superlevel_closed(&self.xs, &self.values, s),
        };
        if t == 0.0 {
            overlap(region, &pieces)
        } else {
            overlap(region, &flow_pieces(&pieces, t, None))
        }
    }

    /// `|V ∩ T_t{p > s}|`.
    pub fn flowed_measure(&self, region: &[(f64, f64)], t: f64, s: f64) -> f64 {
        self.measure(region, t, s, Side::Open)
    }

    /// `∫ g(s) ds` over `[lo, hi]`. Panels break at the node values, where the
    /// superlevel sets change their rate of growth or jump; each panel takes
    /// the one-sided limits of `g` at its ends.
    fn level_integral(&self, lo: f64, hi: f64, scale: f64, g: &dyn Fn(f64, Side) -> f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let mut breaks: Vec<f64> = self.values.iter().copied().filter(|&v| v > lo && v < hi).collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
        let min_width = 1e-9 * hi.abs().max(lo.abs());
        let inner = |s: f64| g(s, Side::Open);
        breaks
            .windows(2)
            .map(|w| integrate_piecewise_linear(&inner, (w[0], g(w[0], Side::Open)), (w[1], g(w[1], Side::Closed)), tol, min_width))
            .sum()
    }

    fn top(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `∫_V (p^t - p)` via `∫_V p^t = ∫_0^∞ |V ∩ T_t{p > s}| ds`, exact up to round-off
    /// because the integrand is piecewise linear in `s` between node values.
    pub fn region_change(&self, region: &[(f64, f64)], t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let size: f64 = region.iter().map(|(a, b)| (b - a).max(0.0)).sum();
        self.level_integral(0.0, self.top(), size, &|s, side| self.measure(region, t, s, side) - self.measure(region, 0.0, s, side))
    }

    /// `∫_V |p^t - c|`, by the same layer-cake evaluation.
    pub fn region_deviation(&self, region: &[(f64, f64)], t: f64, c: f64) -> f64 {
        let size: f64 = region.iter().map(|(a, b)| (b - a).max(0.0)).sum();
        let top = self.top();
        let c = c.clamp(0.0, top);
        let above = self.level_integral(c, top, size, &|s, side| self.measure(region, t, s, side));
        let below = self.level_integral(0.0, c, size, &|s, side| size - self.measure(region, t, s, side));
        above + below
    }
}

fn check_admissible(u: &GridField, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("flow time {t} is negative")));
    }
    if let Some(v) = u.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("field value {v} is negative")));
    }
    Ok(())
}

/// Continuous Steiner symmetrization `u^t` with respect to `x₁`, with at least `levels` levels per row.
pub fn csts_field_with_levels(u: &GridField, t: f64, levels: usize) -> Result<GridField> {
    check_admissible(u, t)?;
    if t == 0.0 {
        return Ok(u.clone());
    }
    let n = u.n();
    let xs: Vec<f64> = (0..n).map(|i| u.coord(i)).collect();
    let mut out = u.zeros_like();
    for j in 0..n {
        let row = u.row(j);
        let Some(first) = row.iter().position(|&v| v > 0.0) else { continue };
        let last = row.iter().rposition(|&v| v > 0.0).unwrap_or(first);
        // Flowed sets stay inside the hull of the support and its mirror image.
        let lo = first.min(n - 1 - last).saturating_sub(1);
        let hi = (last.max(n - 1 - first) + 1).min(n - 1);
        let slice = SliceProfile::new(xs[lo..=hi].to_vec(), row[lo..=hi].to_vec(), levels)?;
        for (k, v) in slice.flow(t).into_iter().enumerate() {
            out.set(lo + k, j, v);
        }
    }
    Ok(out)
}

/// `u^t` with the default level count; `t = f64::INFINITY` gives the Steiner symmetrization.
pub fn csts_field(u: &GridField, t: f64) -> Result<GridField> {
    csts_field_with_levels(u, t, DEFAULT_LEVELS)
}

/// Steiner symmetrization `u*` with respect to `x₁`.
pub fn steiner_field(u: &GridField) -> Result<GridField> {
    csts_field(u, f64::INFINITY)
}

/// CStS in the direction at angle `direction` from the `x₁`-axis.
pub fn csts_field_rotated(u: &GridField, direction: f64, t: f64) -> Result<GridField> {
    if direction == 0.0 {
        return csts_field(u, t);
    }
    let vt = csts_field(&rotated_slices(u, direction), t)?;
    Ok(vt.rotated_frame(-direction))
}

/// `u` in the frame rotated by `direction`, clipped at zero and set to zero on
/// the unit circle, where resampling would otherwise mix in exterior nodes.
pub fn rotated_slices(u: &GridField, direction: f64) -> GridField {
    let mut v = u.rotated_frame_dirichlet(direction).map(|x| x.max(0.0));
    if direction != 0.0 {
        for j in 0..v.n() {
            for i in 0..v.n() {
                if v.inside(i, j) && v.point(i, j).norm_sq() >= 1.0 - 1e-12 {
                    v.set(i, j, 0.0);
                }
            }
        }
    }
    v
}

/// `Σ |∇_h u|² h²` with central differences, `u` extended by zero off the disc.
pub fn dirichlet_energy(u: &GridField) -> f64 {
    let n = u.n();
    let h = u.h();
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            0.0
        } else {
            u.get(i as usize, j as usize)
        }
    };
    let mut e = 0.0;
    for j in 0..n as isize {
        for i in 0..n as isize {
            let d1 = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
            let d2 = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
            e += d1 * d1 + d2 * d2;
        }
    }
    e * h * h
}

/// `(∫ u^t v^t, ∫ u v)`, both by the layer-cake product of the row
/// interpolants; the first dominates the second up to round-off.
pub fn hardy_littlewood_check(u: &GridField, v: &GridField, t: f64) -> Result<(f64, f64)> {
    check_admissible(u, t)?;
    check_admissible(v, t)?;
    Ok((super::properties::layer_cake_product(u, v, t)?, super::properties::layer_cake_product(u, v, 0.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn bump(c: Point2, r: f64) -> impl Fn(Point2) -> f64 {
        move |p| (r * r - p.dist(c).powi(2)).max(0.0).powi(2)
    }

    #[test]
    fn superlevel_sets_of_a_tent() {
        let xs = vec![-1.0, 0.0, 1.0];
        let p = vec![0.0, 1.0, 0.0];
        assert_eq!(superlevel_open(&xs, &p, 0.5), vec![(-0.5, 0.5)]);
        assert_eq!(superlevel_closed(&xs, &p, 1.0), vec![(0.0, 0.0)]);
        assert!(superlevel_open(&xs, &p, 1.0).is_empty());
    }

    #[test]
    fn plateau_splits_open_sets_at_touching_nodes() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let p = vec![0.0, 2.0, 1.0, 2.0, 0.0];
        assert_eq!(superlevel_open(&xs, &p, 1.0).len(), 2);
        assert_eq!(superlevel_closed(&xs, &p, 1.0).len(), 1);
    }

    #[test]
    fn identity_at_time_zero() {
        let u = GridField::from_fn(65, bump(Point2::new(0.2, 0.1), 0.5)).unwrap();
        assert_eq!(csts_field(&u, 0.0).unwrap(), u);
    }

    #[test]
    fn radial_field_is_fixed() {
        let u = GridField::from_fn(65, bump(Point2::ORIGIN, 0.7)).unwrap();
        for &t in &[0.3, 2.0, f64::INFINITY] {
            let ut = csts_field(&u, t).unwrap();
            assert!(ut.sup_distance(&u).unwrap() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn shifted_bump_recentres() {
        let u = GridField::from_fn(65, bump(Point2::new(0.3, 0.0), 0.4)).unwrap();
        let s = steiner_field(&u).unwrap();
        let c = GridField::from_fn(65, bump(Point2::ORIGIN, 0.4)).unwrap();
        assert!(s.sup_distance(&c).unwrap() < 5e-3, "{}", s.sup_distance(&c).unwrap());
    }

    #[test]
    fn energy_of_the_torsion_function() {
        let u = GridField::from_fn(257, |p| (1.0 - p.norm_sq()) / 4.0).unwrap();
        let e = dirichlet_energy(&u);
        assert!((e - std::f64::consts::PI / 8.0).abs() < 5e-3, "{e}");
    }

    #[test]
    fn negative_input_is_rejected() {
        let u = GridField::from_fn(33, |p| p.x1).unwrap();
        assert!(csts_field(&u, 0.1).is_err());
        let ok = GridField::zeros(33).unwrap();
        assert!(csts_field(&ok, -1.0).is_err());
    }
}
