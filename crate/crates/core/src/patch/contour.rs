//! Marching-squares level-set extraction.
//!
//! Segments are oriented so that the super-level side `{u > c}` lies on
//! their left; closed loops are therefore counter-clockwise exactly when
//! they enclose super-level region.

use std::collections::HashMap;

use super::polygon::{signed_area, JordanPolygon};
use super::spec::PatchComponent;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::GridField;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub level: f64,
    pub points: Vec<Point2>,
    pub closed: bool,
}

impl LevelCurve {
    /// Positive when the loop encloses the super-level side.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    /// Converts a closed loop into a Jordan polygon, refining tiny loops up to
    /// the minimum vertex count.
    pub fn to_polygon(&self) -> Result<JordanPolygon> {
        if !self.closed {
            return Err(Error::Geometry(format!("level curve at {} is not closed", self.level)));
        }
        let mut pts = self.points.clone();
        while pts.len() < super::polygon::MIN_VERTICES {
            let n = pts.len();
            pts = (0..n).flat_map(|k| [pts[k], 0.5 * (pts[k] + pts[(k + 1) % n])]).collect();
        }
        JordanPolygon::new(pts)
    }
}

// Cell edges: 0 bottom, 1 right, 2 top, 3 left.
type EdgeKey = (u8, usize, usize);

fn edge_key(i: usize, j: usize, e: u8) -> EdgeKey {
    match e {
        0 => (0, i, j),
        1 => (1, i + 1, j),
        2 => (0, i, j + 1),
        _ => (1, i, j),
    }
}

/// Extracts all level curves `{u = level}` of the grid's piecewise-bilinear field.
pub fn level_curves(u: &GridField, level: f64) -> Vec<LevelCurve> {
    let n = u.n();
    let above = |i: usize, j: usize| u.get(i, j) > level;
    let crossing = |k: EdgeKey| -> Point2 {
        let (dir, i, j) = k;
        let (i2, j2) = if dir == 0 { (i + 1, j) } else { (i, j + 1) };
        let (v0, v1) = (u.get(i, j), u.get(i2, j2));
        let t = ((level - v0) / (v1 - v0)).clamp(1e-9, 1.0 - 1e-9);
        let (p0, p1) = (u.point(i, j), u.point(i2, j2));
        p0 + t * (p1 - p0)
    };
    // Directed segments from one crossed edge to another, super-level on the left.
    let mut next: HashMap<EdgeKey, EdgeKey> = HashMap::new();
    let mut starts: Vec<EdgeKey> = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let b = [above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1)];
            let code = b.iter().enumerate().fold(0u8, |acc, (k, &x)| acc | ((x as u8) << k));
            if code == 0 || code == 15 {
                continue;
            }
            let centre = 0.25 * (u.get(i, j) + u.get(i + 1, j) + u.get(i + 1, j + 1) + u.get(i, j + 1)) > level;
            for (from, to) in cell_segments(code, centre) {
                let (a, b) = (edge_key(i, j, from), edge_key(i, j, to));
                next.insert(a, b);
                starts.push(a);
            }
        }
    }
    let mut prev: HashMap<EdgeKey, EdgeKey> = HashMap::new();
    for (&a, &b) in &next {
        prev.insert(b, a);
    }
    let mut used: HashMap<EdgeKey, bool> = HashMap::new();
    let mut curves = Vec::new();
    // Open chains first (they start where nothing leads in), then loops.
    let mut ordered: Vec<EdgeKey> = starts.iter().copied().filter(|k| !prev.contains_key(k)).collect();
    ordered.extend(starts.iter().copied().filter(|k| prev.contains_key(k)));
    for s in ordered {
        if used.contains_key(&s) {
            continue;
        }
        let mut keys = vec![s];
        used.insert(s, true);
        let mut cur = s;
        let mut closed = false;
        while let Some(&nx) = next.get(&cur) {
            if nx == s {
                closed = true;
                break;
            }
            if used.contains_key(&nx) {
                break;
            }
            used.insert(nx, true);
            keys.push(nx);
            cur = nx;
        }
        let mut points: Vec<Point2> = keys.into_iter().map(crossing).collect();
        points.dedup_by(|a, b| a.dist(*b) < 1e-13);
        if closed && points.len() > 1 && points[0].dist(*points.last().unwrap()) < 1e-13 {
            points.pop();
        }
        if closed && points.len() < 3 {
            continue;
        }
        curves.push(LevelCurve { level, points, closed });
    }
    curves
}

/// Oriented segments for a marching-squares case. Corners are numbered
/// counter-clockwise from the bottom-left; walking along each segment keeps
/// the above-level corners on the left.
fn cell_segments(code: u8, centre_above: bool) -> Vec<(u8, u8)> {
    match code {
        1 => vec![(0, 3)],
        2 => vec![(1, 0)],
        3 => vec![(1, 3)],
        4 => vec![(2, 1)],
        5 if centre_above => vec![(0, 1), (2, 3)],
        5 => vec![(0, 3), (2, 1)],
        6 => vec![(2, 0)],
        7 => vec![(2, 3)],
        8 => vec![(3, 2)],
        9 => vec![(0, 2)],
        10 if centre_above => vec![(3, 0), (1, 2)],
        10 => vec![(1, 0), (3, 2)],
        11 => vec![(1, 2)],
        12 => vec![(3, 1)],
        13 => vec![(0, 1)],
        14 => vec![(3, 0)],
        _ => vec![],
    }
}

/// Minimum `|∇u|` along a curve (bilinear interpolation of the discrete gradient),
/// with the point where it is attained.
pub fn min_gradient_on(curve: &[Point2], grad: &crate::grid::VectorField) -> (f64, Point2) {
    curve
        .iter()
        .map(|&p| (grad.v1.sample(p).hypot(grad.v2.sample(p)), p))
        .fold((f64::INFINITY, Point2::ORIGIN), |a, b| if b.0 < a.0 { b } else { a })
}

/// Connected components of the band `{lower < u < upper}` (either bound may
/// be absent) that stay away from the disc boundary, as patch components.
///
/// Faces of the loop-nesting tree are classified by loop orientation: a face
/// just inside a level-`lower` loop is in the band when that loop is
/// counter-clockwise, one inside a level-`upper` loop when it is clockwise.
pub fn band_components(u: &GridField, lower: Option<f64>, upper: Option<f64>) -> Result<Vec<PatchComponent>> {
    let mut loops: Vec<(LevelCurve, bool)> = Vec::new();
    for (lvl, is_lower) in [(lower, true), (upper, false)] {
        if let Some(c) = lvl {
            for curve in level_curves(u, c) {
                if !curve.closed {
                    return Err(Error::Geometry(format!("level {c} meets the edge of the grid")));
                }
                loops.push((curve, is_lower));
            }
        }
    }
    let polys: Vec<JordanPolygon> = loops.iter().map(|(c, _)| c.to_polygon()).collect::<Result<_>>()?;
    // parent[k] = innermost loop strictly containing loop k.
    let m = polys.len();
    let mut parent: Vec<Option<usize>> = vec![None; m];
    for k in 0..m {
        let probe = polys[k].vertices()[0];
        let mut best: Option<(usize, f64)> = None;
        for l in 0..m {
            if l != k && polys[l].winding_number(probe) != 0 {
                let a = polys[l].area();
                if best.map_or(true, |(_, ba)| a < ba) {
                    best = Some((l, a));
                }
            }
        }
        parent[k] = best.map(|b| b.0);
    }
    let mut out = Vec::new();
    for k in 0..m {
        let (curve, is_lower) = &loops[k];
        let ccw = curve.signed_area() > 0.0;
        if ccw != *is_lower {
            continue;
        }
        let holes: Vec<JordanPolygon> = (0..m).filter(|&l| parent[l] == Some(k)).map(|l| polys[l].clone()).collect();
        out.push(PatchComponent::new(polys[k].clone(), holes)?);
    }
    Ok(out)
}
