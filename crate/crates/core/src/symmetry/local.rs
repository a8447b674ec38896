use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{GridField, VectorField};

/// Multiple of `h·Lip(∇u)` added to the caller's tolerance before a pair counts as mismatched.
pub const MISMATCH_FACTOR: f64 = 1.0;

/// Outcome of the local-symmetry pairing test in one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub direction: f64,
    pub pairs: usize,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// No admissible sample point was found; the pass is vacuous.
    pub degenerate: bool,
    /// Worst sample point, in the original coordinates.
    pub worst: Option<Point2>,
}

struct Frame {
    v: GridField,
    grad: VectorField,
}

impl Frame {
    fn new(u: &GridField, direction: f64) -> Self {
        let v = if direction == 0.0 { u.clone() } else { u.rotated_frame_dirichlet(direction) };
        let grad = v.gradient();
        Frame { v, grad }
    }

    /// Node and its four neighbours carry positive values, so central differences there see no kink at the support edge.
    fn interior(&self, i: usize, j: usize) -> bool {
        let n = self.v.n();
        i > 0
            && j > 0
            && i + 1 < n
            && j + 1 < n
            && [(i, j), (i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)].iter().all(|&(a, b)| self.v.get(a, b) > 0.0)
    }

    fn gradient_lipschitz(&self) -> f64 {
        let n = self.v.n();
        let h = self.v.h();
        let mut lip: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                if !self.interior(i, j) {
                    continue;
                }
                for (a, b) in [(i + 1, j), (i, j + 1)] {
                    if a < n && b < n && self.interior(a, b) {
                        for g in [&self.grad.v1, &self.grad.v2] {
                            lip = lip.max((g.get(i, j) - g.get(a, b)).abs() / h);
                        }
                    }
                }
            }
        }
        lip
    }
}

/// Tests the local-symmetry pairing along `direction` (angle from the `x₁`-axis).
pub fn check_direction(u: &GridField, direction: f64, tol: f64) -> Result<SymmetryReport> {
    if !(tol >= 0.0) {
        return Err(Error::Precondition(format!("tolerance {tol} must be non-negative")));
    }
    if u.values().iter().any(|&x| x < 0.0) {
        return Err(Error::Domain("local symmetry is tested on non-negative fields".into()));
    }
    let f = Frame::new(u, direction);
    let n = f.v.n();
    let h = f.v.h();
    let sup = f.v.sup();
    let tolerance = tol + MISMATCH_FACTOR * h * f.gradient_lipschitz();
    let mut pairs = 0;
    let mut worst = (0.0f64, None);
    for j in 0..n {
        let row = f.v.row(j);
        for i in 0..n {
            let c = row[i];
            if !(c > 0.0 && c < sup) || !f.interior(i, j) {
                continue;
            }
            let (g1, g2) = (f.grad.v1.get(i, j), f.grad.v2.get(i, j));
            if g1 <= tol || g1.hypot(g2) <= tol {
                continue;
            }
            let Some(k) = (i + 1..n).find(|&k| row[k] <= c) else { continue };
            if k == i + 1 || !f.interior(k - 1, j) || !f.interior(k, j) {
                continue;
            }
            let s = (row[k - 1] - c) / (row[k - 1] - row[k]);
            let lerp = |g: &GridField| (1.0 - s) * g.get(k - 1, j) + s * g.get(k, j);
            let mismatch = (g2 - lerp(&f.grad.v2)).abs() + (g1 + lerp(&f.grad.v1)).abs();
            pairs += 1;
            if worst.1.is_none() || mismatch > worst.0 {
                worst = (mismatch, Some(Point2::new(f.v.coord(i), f.v.coord(j)).rotate(direction)));
            }
        }
    }
    let degenerate = pairs == 0;
    Ok(SymmetryReport {
        direction,
        pairs,
        max_mismatch: worst.0,
        tolerance,
        passed: degenerate || worst.0 <= tolerance,
        degenerate,
        worst: worst.1,
    })
}

/// `check_direction` at `n_dirs` equally spaced directions in `[0, π)`.
pub fn check_all_directions(u: &GridField, n_dirs: usize, tol: f64) -> Result<Vec<SymmetryReport>> {
    if n_dirs < 8 {
        return Err(Error::Precondition(format!("need at least 8 directions, got {n_dirs}")));
    }
    (0..n_dirs).map(|k| check_direction(u, std::f64::consts::PI * k as f64 / n_dirs as f64, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap(c: Point2, r: f64) -> impl Fn(Point2) -> f64 {
        move |p| (r * r - p.dist(c).powi(2)).max(0.0).powi(2)
    }

    #[test]
    fn centred_cap_is_symmetric() {
        let u = GridField::from_fn(129, cap(Point2::ORIGIN, 0.6)).unwrap();
        for &d in &[0.0, 0.4, 1.3] {
            let r = check_direction(&u, d, 1e-3).unwrap();
            assert!(r.passed && r.pairs > 100, "{r:?}");
        }
    }

    #[test]
    fn off_centre_cap_is_locally_symmetric() {
        let u = GridField::from_fn(129, cap(Point2::new(0.3, 0.0), 0.4)).unwrap();
        let reports = check_all_directions(&u, 8, 1e-3).unwrap();
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }

    #[test]
    fn sheared_bump_fails() {
        let u = GridField::from_fn(129, |p| {
            (-(p.x1 + p.x2).powi(2) - 4.0 * p.x2 * p.x2).exp() * (1.0 - p.norm_sq()).max(0.0).powi(2)
        })
        .unwrap();
        let r = check_direction(&u, 0.0, 1e-3).unwrap();
        assert!(!r.passed, "{r:?}");
    }

    #[test]
    fn flat_field_is_vacuous() {
        let r = check_direction(&GridField::zeros(33).unwrap(), 0.0, 1e-3).unwrap();
        assert!(r.degenerate && r.passed);
    }
}
