use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

pub const MIN_VERTICES: usize = 8;

/// A simple closed polygon, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct JordanPolygon {
    vertices: Vec<Point2>,
    /// Cumulative arc length at each vertex; the last entry is the perimeter.
    arc: Vec<f64>,
}

impl TryFrom<Vec<Point2>> for JordanPolygon {
    type Error = Error;
    fn try_from(v: Vec<Point2>) -> Result<Self> {
        JordanPolygon::new(v)
    }
}

impl From<JordanPolygon> for Vec<Point2> {
    fn from(p: JordanPolygon) -> Self {
        p.vertices
    }
}

impl JordanPolygon {
    /// Validates and orients a vertex loop (the closing edge is implicit).
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < MIN_VERTICES {
            return Err(Error::Geometry(format!(
                "a Jordan polygon needs at least {MIN_VERTICES} vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::Geometry(format!("non-finite vertex {p:?}")));
        }
        if let Some(p) = vertices.iter().find(|p| !p.in_closed_disc()) {
            return Err(Error::Geometry(format!("vertex {p:?} lies outside the closed unit disc")));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let poly = Self::new_unchecked(vertices);
        if poly.area() <= 0.0 {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        poly.check_simple()?;
        Ok(poly)
    }

    pub(crate) fn new_unchecked(vertices: Vec<Point2>) -> Self {
        let mut arc = Vec::with_capacity(vertices.len() + 1);
        let mut s = 0.0;
        arc.push(0.0);
        for k in 0..vertices.len() {
            s += vertices[k].dist(vertices[(k + 1) % vertices.len()]);
            arc.push(s);
        }
        JordanPolygon { vertices, arc }
    }

    /// Regular polygon inscribed in the circle `|x - center| = r`.
    pub fn circle(center: Point2, r: f64, n: usize) -> Result<Self> {
        Self::ellipse(center, r, r, 0.0, n)
    }

    /// Polygon with vertices on an ellipse with semi-axes `a` (along the
    /// direction `tilt`) and `b`.
    pub fn ellipse(center: Point2, a: f64, b: f64, tilt: f64, n: usize) -> Result<Self> {
        let verts = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                center + Point2::new(a * th.cos(), b * th.sin()).rotate(tilt)
            })
            .collect();
        Self::new(verts)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn perimeter(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Point at arc length `s` (taken modulo the perimeter).
    pub fn point_at_arclength(&self, s: f64) -> Point2 {
        let total = self.perimeter();
        let s = s.rem_euclid(total);
        let k = match self.arc.binary_search_by(|a| a.partial_cmp(&s).unwrap()) {
            Ok(k) => k.min(self.vertices.len() - 1),
            Err(k) => k - 1,
        };
        let (a, b) = (self.vertices[k], self.vertices[(k + 1) % self.vertices.len()]);
        let len = self.arc[k + 1] - self.arc[k];
        if len == 0.0 {
            return a;
        }
        let f = (s - self.arc[k]) / len;
        a + f * (b - a)
    }

    /// `per_edge` equally spaced samples on every edge, starting at its first vertex.
    pub fn samples(&self, per_edge: usize) -> Vec<Point2> {
        let per_edge = per_edge.max(1);
        let mut out = Vec::with_capacity(self.len() * per_edge);
        for (a, b) in self.edges() {
            for s in 0..per_edge {
                let f = s as f64 / per_edge as f64;
                out.push(a + f * (b - a));
            }
        }
        out
    }

    pub fn max_radius(&self) -> f64 {
        self.vertices.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn rotate(&self, angle: f64) -> Self {
        Self::new_unchecked(self.vertices.iter().map(|p| p.rotate(angle)).collect())
    }

    pub fn translate(&self, by: Point2) -> Self {
        Self::new_unchecked(self.vertices.iter().map(|&p| p + by).collect())
    }

    /// Inserts edge midpoints, doubling the vertex count without changing the shape.
    pub fn refine(&self) -> Self {
        let mut v = Vec::with_capacity(2 * self.len());
        for (a, b) in self.edges() {
            v.push(a);
            v.push(0.5 * (a + b));
        }
        Self::new_unchecked(v)
    }

    /// Winding number of the curve about `p` (non-zero means enclosed).
    pub fn winding_number(&self, p: Point2) -> i32 {
        let mut w = 0;
        for (a, b) in self.edges() {
            if a.x2 <= p.x2 {
                if b.x2 > p.x2 && (b - a).cross(p - a) > 0.0 {
                    w += 1;
                }
            } else if b.x2 <= p.x2 && (b - a).cross(p - a) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    /// Even-odd crossing test; kept separate from the winding rule so the
    /// two can be cross-checked.
    pub fn even_odd(&self, p: Point2) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.x2 > p.x2) != (b.x2 > p.x2) {
                let x = a.x1 + (p.x2 - a.x2) / (b.x2 - a.x2) * (b.x1 - a.x1);
                if p.x1 < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    /// Strict interior membership: boundary points are outside.
    pub fn contains(&self, p: Point2) -> bool {
        self.winding_number(p) != 0 && self.boundary_distance(p) > 1e-14
    }

    /// Checks that no two non-adjacent edges meet, using a bucket grid so
    /// large polygons stay cheap.
    fn check_simple(&self) -> Result<()> {
        let n = self.len();
        let cell = (2.0 * self.perimeter() / n as f64).max(1e-9);
        let key = |x: f64| (x / cell).floor() as i64;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, (a, b)) in self.edges().enumerate() {
            for bx in key(a.x1.min(b.x1))..=key(a.x1.max(b.x1)) {
                for by in key(a.x2.min(b.x2))..=key(a.x2.max(b.x2)) {
                    buckets.entry((bx, by)).or_default().push(k);
                }
            }
        }
        for list in buckets.values() {
            for (ia, &e) in list.iter().enumerate() {
                for &f in &list[ia + 1..] {
                    let adjacent = (e + 1) % n == f || (f + 1) % n == e;
                    if adjacent {
                        continue;
                    }
                    let (a, b) = (self.vertices[e], self.vertices[(e + 1) % n]);
                    let (c, d) = (self.vertices[f], self.vertices[(f + 1) % n]);
                    if segments_intersect(a, b, c, d) {
                        return Err(Error::Geometry(format!("polygon self-intersects near {a:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when the two closed curves share a point.
    pub fn crosses(&self, other: &JordanPolygon) -> bool {
        let cell = (self.perimeter() / self.len() as f64)
            .max(other.perimeter() / other.len() as f64)
            .max(1e-9)
            * 2.0;
        let key = |x: f64| (x / cell).floor() as i64;
        let mut buckets: HashMap<(i64, i64), Vec<(Point2, Point2)>> = HashMap::new();
        for (a, b) in self.edges() {
            for bx in key(a.x1.min(b.x1))..=key(a.x1.max(b.x1)) {
                for by in key(a.x2.min(b.x2))..=key(a.x2.max(b.x2)) {
                    buckets.entry((bx, by)).or_default().push((a, b));
                }
            }
        }
        for (c, d) in other.edges() {
            for bx in key(c.x1.min(d.x1))..=key(c.x1.max(d.x1)) {
                for by in key(c.x2.min(d.x2))..=key(c.x2.max(d.x2)) {
                    if let Some(list) = buckets.get(&(bx, by)) {
                        if list.iter().any(|&(a, b)| segments_intersect(a, b, c, d)) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

pub fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n).map(|k| v[k].cross(v[(k + 1) % n])).sum::<f64>() * 0.5
}

pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sq();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + t * ab)
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x1 >= a.x1.min(b.x1) && p.x1 <= a.x1.max(b.x1) && p.x2 >= a.x2.min(b.x2) && p.x2 <= a.x2.max(b.x2)
}

pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n_side: usize) -> Vec<Point2> {
        let mut v = Vec::new();
        let s = 0.5;
        for k in 0..n_side {
            v.push(Point2::new(-s + 2.0 * s * k as f64 / n_side as f64, -s));
        }
        for k in 0..n_side {
            v.push(Point2::new(s, -s + 2.0 * s * k as f64 / n_side as f64));
        }
        for k in 0..n_side {
            v.push(Point2::new(s - 2.0 * s * k as f64 / n_side as f64, s));
        }
        for k in 0..n_side {
            v.push(Point2::new(-s, s - 2.0 * s * k as f64 / n_side as f64));
        }
        v
    }

    #[test]
    fn orientation_is_normalised() {
        let mut v = square(3);
        v.reverse();
        let p = JordanPolygon::new(v).unwrap();
        assert!((p.area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(JordanPolygon::new(square(1)).is_err());
        let mut bow = square(3);
        bow.swap(2, 8);
        assert!(JordanPolygon::new(bow).is_err());
        let far: Vec<_> = (0..10).map(|k| Point2::polar(1.5, k as f64)).collect();
        assert!(JordanPolygon::new(far).is_err());
    }

    #[test]
    fn boundary_points_are_outside() {
        let p = JordanPolygon::new(square(3)).unwrap();
        assert!(p.contains(Point2::new(0.1, 0.2)));
        assert!(!p.contains(Point2::new(0.5, 0.0)));
        assert!(!p.contains(Point2::new(0.7, 0.0)));
    }

    #[test]
    fn arclength_walks_the_boundary() {
        let p = JordanPolygon::new(square(2)).unwrap();
        assert!((p.perimeter() - 4.0).abs() < 1e-14);
        let q = p.point_at_arclength(1.5);
        assert!((q.x1 - 0.5).abs() < 1e-14 && (q.x2 - 0.0).abs() < 1e-14);
    }

    #[test]
    fn refine_keeps_shape() {
        let p = JordanPolygon::circle(Point2::ORIGIN, 0.4, 16).unwrap();
        let r = p.refine();
        assert_eq!(r.len(), 32);
        assert!((r.area() - p.area()).abs() < 1e-15);
    }

    #[test]
    fn large_circles_validate() {
        let p = JordanPolygon::circle(Point2::new(0.1, 0.0), 0.5, 20000).unwrap();
        assert!((p.area() - PI * 0.25).abs() < 1e-7);
    }
}
