//! Sampling patches onto grids: node membership by scanline crossings and
//! exact cell coverage by signed-area accumulation.

use super::polygon::JordanPolygon;
use super::spec::{MultiScalePatch, PatchSpec};
use crate::grid::GridField;

/// Crossing abscissae of every curve with each grid row `x2 = -1 + j h`.
fn row_crossings<'a>(curves: impl Iterator<Item = &'a JordanPolygon>, n: usize, h: f64) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new(); n];
    for curve in curves {
        for (a, b) in curve.edges() {
            if a.x2 == b.x2 {
                continue;
            }
            let (lo, hi) = if a.x2 < b.x2 { (a, b) } else { (b, a) };
            // Half-open rule lo <= y < hi keeps vertex crossings counted once.
            let j0 = ((lo.x2 + 1.0) / h).ceil().max(0.0) as usize;
            let mut j = j0;
            while j < n {
                let y = -1.0 + j as f64 * h;
                if y >= hi.x2 {
                    break;
                }
                if y >= lo.x2 {
                    let x = lo.x1 + (y - lo.x2) / (hi.x2 - lo.x2) * (hi.x1 - lo.x1);
                    rows[j].push(x);
                }
                j += 1;
            }
        }
    }
    for r in &mut rows {
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    rows
}

fn fill_even_odd(rows: &[Vec<f64>], out: &mut GridField, weight: f64) {
    let n = out.n();
    for (j, xs) in rows.iter().enumerate() {
        for i in 0..n {
            let x = out.coord(i);
            if xs.iter().any(|&c| c == x) {
                continue;
            }
            let right = xs.len() - xs.partition_point(|&c| c < x);
            if right % 2 == 1 {
                out.set(i, j, out.get(i, j) + weight);
            }
        }
    }
}

/// Node-sampled indicator `1_D` on the grid of `template`.
pub fn indicator(patch: &PatchSpec, template: &GridField) -> GridField {
    let mut out = template.zeros_like();
    for comp in patch.components() {
        let rows = row_crossings(comp.signed_curves().map(|(c, _)| c), out.n(), out.h());
        fill_even_odd(&rows, &mut out, 1.0);
    }
    out
}

/// Node-sampled `Σ α_i 1_{D_i}`.
pub fn weighted_indicator(patch: &MultiScalePatch, template: &GridField) -> GridField {
    let mut out = template.zeros_like();
    for (alpha, comp) in patch.terms() {
        let rows = row_crossings(comp.signed_curves().map(|(c, _)| c), out.n(), out.h());
        fill_even_odd(&rows, &mut out, *alpha);
    }
    out
}

/// Fraction of each node-centred cell covered by the region enclosed by
/// the signed curves, computed exactly for polygons.
///
/// Uses `area = ∫ w`, with the winding number `w` accumulated edge by edge
/// along rows and prefix-summed.
pub fn coverage<'a>(curves: impl Iterator<Item = (&'a JordanPolygon, f64)>, n: usize, h: f64) -> Vec<f64> {
    let origin = -1.0 - 0.5 * h;
    let mut direct = vec![0.0; n * (n + 1)];
    let mut carry = vec![0.0; n * (n + 1)];
    for (curve, sign) in curves {
        for (a, b) in curve.edges() {
            let (ua, va) = ((a.x1 - origin) / h, (a.x2 - origin) / h);
            let (ub, vb) = ((b.x1 - origin) / h, (b.x2 - origin) / h);
            if va == vb {
                continue;
            }
            let (vmin, vmax) = (va.min(vb), va.max(vb));
            let r0 = vmin.floor().max(0.0) as usize;
            let r1 = (vmax.ceil() as usize).min(n);
            for r in r0..r1 {
                let lo = vmin.max(r as f64);
                let hi = vmax.min(r as f64 + 1.0);
                if hi <= lo {
                    continue;
                }
                // Piece of the edge inside this row, traversed in edge order.
                let (vs, ve) = if vb > va { (lo, hi) } else { (hi, lo) };
                let xs = ua + (vs - va) / (vb - va) * (ub - ua);
                let xe = ua + (ve - va) / (vb - va) * (ub - ua);
                deposit(&mut direct[r * (n + 1)..(r + 1) * (n + 1)], &mut carry[r * (n + 1)..(r + 1) * (n + 1)], xs, xe, ve - vs, sign);
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        let mut run = 0.0;
        for c in 0..n {
            run += carry[r * (n + 1) + c];
            // The running sum leaves round-off of either sign in empty cells.
            out[r * n + c] = (direct[r * (n + 1) + c] + run).clamp(0.0, 1.0);
        }
    }
    out
}

/// Splits a row piece at column boundaries and records its contribution:
/// the cell holding a sub-piece gets the area to its right inside the cell,
/// every later cell in the row gets the full `-dv`.
fn deposit(direct: &mut [f64], carry: &mut [f64], xs: f64, xe: f64, dv: f64, sign: f64) {
    let ncols = direct.len() - 1;
    let mut cuts = vec![0.0, 1.0];
    let (xl, xr) = (xs.min(xe), xs.max(xe));
    let mut k = xl.floor() + 1.0;
    while k < xr {
        cuts.push((k - xs) / (xe - xs));
        k += 1.0;
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in cuts.windows(2) {
        let (l0, l1) = (w[0], w[1]);
        if l1 <= l0 {
            continue;
        }
        let x0 = xs + l0 * (xe - xs);
        let x1 = xs + l1 * (xe - xs);
        let sub_dv = dv * (l1 - l0);
        let xm = 0.5 * (x0 + x1);
        let col = (xm.floor().max(0.0) as usize).min(ncols - 1);
        direct[col] += -sign * sub_dv * (col as f64 + 1.0 - xm);
        carry[col + 1] += -sign * sub_dv;
    }
}

/// Cell-averaged `1_D`: exact covered fraction of each node's cell.
pub fn area_weighted_indicator(patch: &PatchSpec, template: &GridField) -> GridField {
    let cov = coverage(patch.boundary_curves(), template.n(), template.h());
    GridField::from_values(template.n(), cov).expect("coverage has one value per node")
}

/// Cell-averaged `Σ α_i 1_{D_i}`.
pub fn area_weighted_density(patch: &MultiScalePatch, template: &GridField) -> GridField {
    let n = template.n();
    let mut acc = vec![0.0; n * n];
    for (alpha, comp) in patch.terms() {
        let cov = coverage(comp.signed_curves(), n, template.h());
        for (a, c) in acc.iter_mut().zip(cov) {
            *a += alpha * c;
        }
    }
    GridField::from_values(n, acc).expect("coverage has one value per node")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::patch::spec::PatchComponent;

    #[test]
    fn coverage_sums_to_area() {
        let g = GridField::zeros(65).unwrap();
        let p = PatchSpec::single(PatchComponent::annulus(Point2::new(0.1, -0.05), 0.2, 0.5, 97).unwrap()).unwrap();
        let c = area_weighted_indicator(&p, &g);
        assert!((c.integral() - p.area()).abs() < 1e-12, "{} vs {}", c.integral(), p.area());
        assert!(c.values().iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn coverage_of_aligned_square_is_exact() {
        let g = GridField::zeros(33).unwrap();
        let h = g.h();
        // Square covering exactly the cells of nodes i, j in 14..=17 plus half of column 18.
        let (x0, x1) = (g.coord(14) - 0.5 * h, g.coord(18));
        let (y0, y1) = (g.coord(14) - 0.5 * h, g.coord(17) + 0.5 * h);
        let mut v = Vec::new();
        for k in 0..4 {
            v.push(Point2::new(x0 + (x1 - x0) * k as f64 / 4.0, y0));
        }
        for k in 0..4 {
            v.push(Point2::new(x1, y0 + (y1 - y0) * k as f64 / 4.0));
        }
        for k in 0..4 {
            v.push(Point2::new(x1 - (x1 - x0) * k as f64 / 4.0, y1));
        }
        for k in 0..4 {
            v.push(Point2::new(x0, y1 - (y1 - y0) * k as f64 / 4.0));
        }
        let p = PatchSpec::single(PatchComponent::simple(JordanPolygon::new(v).unwrap())).unwrap();
        let c = area_weighted_indicator(&p, &g);
        assert!((c.get(15, 15) - 1.0).abs() < 1e-12);
        assert!((c.get(18, 15) - 0.5).abs() < 1e-12);
        assert!(c.get(19, 15).abs() < 1e-12);
        assert!(c.get(15, 18).abs() < 1e-12);
    }

    #[test]
    fn indicator_agrees_with_point_tests() {
        let g = GridField::zeros(65).unwrap();
        let ring = PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 50).unwrap();
        let core = PatchComponent::disc(Point2::new(0.05, 0.0), 0.15, 40).unwrap();
        let p = PatchSpec::new(vec![ring, core]).unwrap();
        let ind = indicator(&p, &g);
        for k in 0..65 * 65 {
            let q = g.point_at(k);
            if g.mask()[k] {
                assert_eq!(ind.values()[k] == 1.0, p.contains(q), "at {q:?}");
            }
        }
    }
}
