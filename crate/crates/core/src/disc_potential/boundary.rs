//! Pointwise evaluation of `𝒢[1_D](x) = ∫_D G(x, y) dy` for polygonal patches.
//!
//! The logarithmic part is turned into a boundary integral with
//! `Δ_y [ r²(ln r - 1)/4 ] = ln r`, `r = |y - x|`. On a straight edge the
//! normal component `(y - x)·n` is constant and `∫ ln r ds` has a closed
//! form, so the singular area integral is evaluated exactly, wherever `x`
//! sits relative to `D`. The regular part uses the same formula at the
//! reflected configuration `ln|x/|x| - |x| y|`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::patch::{JordanPolygon, MultiScalePatch, PatchComponent, PatchSpec};

/// `∫ ln sqrt(s² + d²) ds` antiderivative.
#[inline]
fn log_antiderivative(s: f64, d: f64) -> f64 {
    let r2 = s * s + d * d;
    let log_term = if s == 0.0 { 0.0 } else { 0.5 * s * r2.ln() };
    let atan_term = if d == 0.0 { 0.0 } else { d * (s / d).atan() };
    log_term - s + atan_term
}

/// `∫_{scale·int(curve)} ln|x - z| dz`, with the curve taken counter-clockwise.
pub fn log_integral(curve: &JordanPolygon, x: Point2, scale: f64) -> f64 {
    let mut acc = 0.0;
    for (a, b) in curve.edges() {
        let (a, b) = (scale * a, scale * b);
        let e = b - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        let t = (1.0 / len) * e;
        // Outward normal of a counter-clockwise edge.
        let nrm = Point2::new(t.x2, -t.x1);
        let d = (a - x).dot(nrm);
        if d == 0.0 {
            continue;
        }
        let s0 = (a - x).dot(t);
        let s1 = s0 + len;
        let j = log_antiderivative(s1, d) - log_antiderivative(s0, d);
        acc += 0.25 * d * (2.0 * j - len);
    }
    acc
}

fn component_log_integral(c: &PatchComponent, x: Point2, scale: f64) -> f64 {
    c.signed_curves().map(|(curve, sign)| sign * log_integral(curve, x, scale)).sum()
}

/// `∫_C G(x, y) dy` for one component.
pub fn component_potential(c: &PatchComponent, x: Point2) -> f64 {
    let rho = x.norm();
    let singular = component_log_integral(c, x, 1.0);
    let regular = if rho == 0.0 {
        0.0
    } else {
        // ∫_C ln|x̂ - ρ y| dy = ρ⁻² ∫_{ρC} ln|x̂ - z| dz
        component_log_integral(c, (1.0 / rho) * x, rho) / (rho * rho)
    };
    (regular - singular) / (2.0 * PI)
}

fn check_point(x: Point2) -> Result<()> {
    if !x.is_finite() || !x.in_closed_disc() {
        return Err(Error::Domain(format!("{x:?} is outside the closed unit disc")));
    }
    Ok(())
}

fn check_value(v: f64, x: Point2) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical { message: format!("potential evaluation at {x:?} is not finite"), residual: f64::NAN })
    }
}

/// `𝒢[1_D](x)` evaluated pointwise, valid on and off `∂D`.
pub fn stream_boundary(patch: &PatchSpec, x: Point2) -> Result<f64> {
    check_point(x)?;
    let v = patch.components().iter().map(|c| component_potential(c, x)).sum();
    check_value(v, x)
}

/// `𝒢[Σ α_i 1_{D_i}](x)`.
pub fn stream_boundary_weighted(patch: &MultiScalePatch, x: Point2) -> Result<f64> {
    check_point(x)?;
    let v = patch.terms().iter().map(|(a, c)| a * component_potential(c, x)).sum();
    check_value(v, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc_potential::stream_radial;

    #[test]
    fn log_integral_of_square_at_centre() {
        // ∫_{[-1,1]²} ln|z| dz = 2 ln 2 + π - 6 (closed form in polar pieces).
        let corners = [(-1.0, -1.0), (0.0, -1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (-1.0, 1.0), (-1.0, 0.0)];
        let v = corners.iter().map(|&(a, b)| Point2::new(0.5 * a, 0.5 * b)).collect();
        let sq = JordanPolygon::new_unchecked(v);
        let got = log_integral(&sq, Point2::ORIGIN, 2.0);
        let want = 2.0 * 2f64.ln() + PI - 6.0;
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn disc_matches_closed_form_off_boundary() {
        let c = PatchComponent::disc(Point2::ORIGIN, 0.5, 8192).unwrap();
        let p = PatchSpec::single(c).unwrap();
        for &r in &[0.0, 0.2, 0.7, 0.95] {
            let x = Point2::polar(r, 0.3);
            let got = stream_boundary(&p, x).unwrap();
            assert!((got - stream_radial(0.5, x).unwrap()).abs() < 2e-7, "r = {r}");
        }
    }

    #[test]
    fn vanishes_on_the_unit_circle() {
        let c = PatchComponent::disc(Point2::new(0.3, 0.1), 0.2, 256).unwrap();
        let p = PatchSpec::single(c).unwrap();
        for k in 0..7 {
            let x = Point2::polar(1.0, k as f64);
            assert!(stream_boundary(&p, x).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_points_outside() {
        assert!(stream_boundary(&PatchSpec::empty(), Point2::new(1.2, 0.0)).is_err());
    }
}
