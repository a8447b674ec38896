//! Scalar fields sampled on a Cartesian grid over `[-1, 1]^2` with an
//! inside-disc mask.
//!
//! Node `(i, j)` sits at `x1 = -1 + i h`, `x2 = -1 + j h`; values are stored
//! row-major, so a row is a horizontal slice at fixed `x2`. Values at nodes
//! outside the closed unit disc are always zero.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::Point2;

pub const MIN_GRID_N: usize = 33;

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n: usize,
    h: f64,
    values: Vec<f64>,
    mask: Vec<bool>,
    /// Optional Lipschitz bound supplied by whoever built the field.
    pub lipschitz_bound: Option<f64>,
}

/// Velocity-like pair of fields on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub v1: GridField,
    pub v2: GridField,
}

fn disc_mask(n: usize, h: f64) -> Vec<bool> {
    let mut mask = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let x1 = -1.0 + i as f64 * h;
            let x2 = -1.0 + j as f64 * h;
            mask.push(x1 * x1 + x2 * x2 <= 1.0 + 1e-12);
        }
    }
    mask
}

fn catmull_rom(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        0.5 * (-s3 + 2.0 * s2 - s),
        0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
        0.5 * (-3.0 * s3 + 4.0 * s2 + s),
        0.5 * (s3 - s2),
    ]
}

impl GridField {
    pub fn zeros(n: usize) -> Result<Self> {
        if n < MIN_GRID_N {
            return Err(Error::Domain(format!("grid needs n >= {MIN_GRID_N}, got {n}")));
        }
        let h = 2.0 / (n - 1) as f64;
        Ok(GridField { n, h, values: vec![0.0; n * n], mask: disc_mask(n, h), lipschitz_bound: None })
    }

    /// Samples `f` at every in-disc node; masked-out nodes stay zero.
    pub fn from_fn(n: usize, f: impl Fn(Point2) -> f64) -> Result<Self> {
        let mut g = GridField::zeros(n)?;
        for k in 0..n * n {
            if g.mask[k] {
                g.values[k] = f(g.point_at(k));
            }
        }
        Ok(g)
    }

    /// Builds a field from raw row-major values, zeroing anything outside the disc.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        let mut g = GridField::zeros(n)?;
        if values.len() != n * n {
            return Err(Error::Domain(format!("expected {} values, got {}", n * n, values.len())));
        }
        g.values = values;
        for k in 0..n * n {
            if !g.mask[k] {
                g.values[k] = 0.0;
            }
        }
        Ok(g)
    }

    /// A zero field on the same grid.
    pub fn zeros_like(&self) -> Self {
        GridField { n: self.n, h: self.h, values: vec![0.0; self.n * self.n], mask: self.mask.clone(), lipschitz_bound: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.h
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point2 {
        Point2::new(self.coord(i), self.coord(j))
    }

    #[inline]
    pub fn point_at(&self, k: usize) -> Point2 {
        self.point(k % self.n, k / self.n)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    #[inline]
    pub fn inside(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.n + i]
    }

    /// Sets a value; writes outside the disc are ignored.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        if self.mask[k] {
            self.values[k] = v;
        }
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.n == other.n
    }

    pub(crate) fn check_same_grid(&self, other: &GridField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::Domain(format!("grid mismatch: n = {} vs n = {}", self.n, other.n)))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        let mut out = self.clone();
        out.lipschitz_bound = None;
        for k in 0..out.values.len() {
            if out.mask[k] {
                out.values[k] = f(out.values[k]);
            }
        }
        out
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<GridField> {
        self.check_same_grid(other)?;
        let mut out = self.zeros_like();
        for k in 0..out.values.len() {
            if out.mask[k] {
                out.values[k] = f(self.values[k], other.values[k]);
            }
        }
        Ok(out)
    }

    pub fn sup(&self) -> f64 {
        self.masked().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.masked().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_abs(&self) -> f64 {
        self.masked().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn masked(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(&v, _)| v)
    }

    /// Riemann sum `sum v h^2`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.h * self.h
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.h * self.h
    }

    pub fn l1_distance(&self, other: &GridField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.h * self.h)
    }

    pub fn sup_distance(&self, other: &GridField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Bilinear interpolation; zero outside the grid square.
    pub fn sample(&self, p: Point2) -> f64 {
        let fx = (p.x1 + 1.0) / self.h;
        let fy = (p.x2 + 1.0) / self.h;
        let last = (self.n - 1) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= last && fy <= last) {
            return 0.0;
        }
        let i = (fx.floor() as usize).min(self.n - 2);
        let j = (fy.floor() as usize).min(self.n - 2);
        let (sx, sy) = (fx - i as f64, fy - j as f64);
        let v00 = self.get(i, j);
        let v10 = self.get(i + 1, j);
        let v01 = self.get(i, j + 1);
        let v11 = self.get(i + 1, j + 1);
        (1.0 - sy) * ((1.0 - sx) * v00 + sx * v10) + sy * ((1.0 - sx) * v01 + sx * v11)
    }

    /// Like [`GridField::rotated_frame`] for a field vanishing on the unit circle.
    ///
    /// Nodes off the disc are first filled by linear extrapolation along rays
    /// from a point at depth `2h`, so interpolation in cells cut by the circle
    /// sees the continuation of the field rather than zeros.
    pub fn rotated_frame_dirichlet(&self, angle: f64) -> GridField {
        if angle == 0.0 {
            return self.clone();
        }
        let depth = 2.0 * self.h;
        let mut ext = self.clone();
        for k in 0..ext.values.len() {
            if !ext.mask[k] {
                let p = ext.point_at(k);
                let r = p.norm();
                ext.values[k] = -(r - 1.0) / depth * self.sample(((1.0 - depth) / r) * p);
            }
        }
        let mut out = self.zeros_like();
        for k in 0..out.values.len() {
            if out.mask[k] {
                out.values[k] = ext.sample(out.point_at(k).rotate(angle));
            }
        }
        out.lipschitz_bound = self.lipschitz_bound;
        out
    }

    /// Catmull-Rom bicubic interpolation, treating nodes off the grid as zero.
    pub fn sample_cubic(&self, p: Point2) -> f64 {
        let fx = (p.x1 + 1.0) / self.h;
        let fy = (p.x2 + 1.0) / self.h;
        let last = (self.n - 1) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= last && fy <= last) {
            return 0.0;
        }
        let i = (fx.floor() as isize).min(self.n as isize - 2);
        let j = (fy.floor() as isize).min(self.n as isize - 2);
        let wx = catmull_rom(fx - i as f64);
        let wy = catmull_rom(fy - j as f64);
        let n = self.n as isize;
        let mut acc = 0.0;
        for (b, wb) in wy.iter().enumerate() {
            let jj = j + b as isize - 1;
            if jj < 0 || jj >= n {
                continue;
            }
            for (a, wa) in wx.iter().enumerate() {
                let ii = i + a as isize - 1;
                if ii < 0 || ii >= n {
                    continue;
                }
                acc += wa * wb * self.values[jj as usize * self.n + ii as usize];
            }
        }
        acc
    }

    /// The field `v(y) = u(R(angle) y)`, bilinearly resampled.
    ///
    /// Slicing `v` along `y1` is slicing `u` along the direction `angle`.
    pub fn rotated_frame(&self, angle: f64) -> GridField {
        if angle == 0.0 {
            return self.clone();
        }
        let mut out = self.zeros_like();
        for k in 0..out.values.len() {
            if out.mask[k] {
                out.values[k] = self.sample(out.point_at(k).rotate(angle));
            }
        }
        out.lipschitz_bound = self.lipschitz_bound;
        out
    }

    /// Discrete partial derivatives: central differences, second-order one-sided
    /// where a neighbour leaves the disc mask.
    pub fn gradient(&self) -> VectorField {
        let mut d1 = self.zeros_like();
        let mut d2 = self.zeros_like();
        let n = self.n;
        for j in 0..n {
            for i in 0..n {
                if !self.inside(i, j) {
                    continue;
                }
                let k = self.idx(i, j);
                d1.values[k] = self.partial(i, j, true);
                d2.values[k] = self.partial(i, j, false);
            }
        }
        VectorField { v1: d1, v2: d2 }
    }

    fn partial(&self, i: usize, j: usize, along_x1: bool) -> f64 {
        let n = self.n;
        let neighbour = |step: isize| -> Option<f64> {
            let (ii, jj) = if along_x1 { (i as isize + step, j as isize) } else { (i as isize, j as isize + step) };
            if ii < 0 || jj < 0 || ii >= n as isize || jj >= n as isize {
                return None;
            }
            let (ii, jj) = (ii as usize, jj as usize);
            self.inside(ii, jj).then(|| self.get(ii, jj))
        };
        let c = self.get(i, j);
        match (neighbour(-1), neighbour(1)) {
            (Some(a), Some(b)) => (b - a) / (2.0 * self.h),
            (None, Some(b)) => match neighbour(2) {
                Some(b2) => (-3.0 * c + 4.0 * b - b2) / (2.0 * self.h),
                None => (b - c) / self.h,
            },
            (Some(a), None) => match neighbour(-2) {
                Some(a2) => (3.0 * c - 4.0 * a + a2) / (2.0 * self.h),
                None => (c - a) / self.h,
            },
            (None, None) => 0.0,
        }
    }

    /// Five-point Laplacian at node `(i, j)`; `None` unless all four
    /// neighbours are inside the disc.
    pub fn laplacian_at(&self, i: usize, j: usize) -> Option<f64> {
        if i == 0 || j == 0 || i + 1 >= self.n || j + 1 >= self.n {
            return None;
        }
        let nb = [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)];
        if !self.inside(i, j) || nb.iter().any(|&(a, b)| !self.inside(a, b)) {
            return None;
        }
        let s: f64 = nb.iter().map(|&(a, b)| self.get(a, b)).sum();
        Some((s - 4.0 * self.get(i, j)) / (self.h * self.h))
    }

    /// Largest `|u(p) - u(q)| / |p - q|` over horizontally and vertically
    /// adjacent in-disc nodes.
    pub fn discrete_lipschitz(&self) -> f64 {
        let n = self.n;
        let mut best: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                if !self.inside(i, j) {
                    continue;
                }
                let v = self.get(i, j);
                if i + 1 < n && self.inside(i + 1, j) {
                    best = best.max((self.get(i + 1, j) - v).abs());
                }
                if j + 1 < n && self.inside(i, j + 1) {
                    best = best.max((self.get(i, j + 1) - v).abs());
                }
            }
        }
        best / self.h
    }

    /// Writes the canonical CSV form: a first line `n,h`, then one line of
    /// comma-separated values per grid row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{},{:?}", self.n, self.h)?;
        let mut line = String::new();
        for j in 0..self.n {
            line.clear();
            for (i, v) in self.row(j).iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                let _ = write!(line, "{v:?}");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<GridField> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))??;
        let mut parts = header.trim().split(',');
        let n: usize = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let h: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        if n < MIN_GRID_N || (h - 2.0 / (n - 1) as f64).abs() > 1e-12 {
            return Err(Error::Parse(format!("header n = {n}, h = {h} is inconsistent")));
        }
        let mut values = Vec::with_capacity(n * n);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split(',') {
                let v: f64 = tok.trim().parse().map_err(|_| Error::Parse(format!("bad value {tok:?}")))?;
                values.push(v);
            }
        }
        if values.len() != n * n {
            return Err(Error::Parse(format!("expected {} values, found {}", n * n, values.len())));
        }
        GridField::from_values(n, values).map_err(|e| Error::Parse(e.to_string()))
    }
}
