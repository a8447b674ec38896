use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{norm, vstate_residual, BranchPoint, FourierBoundary, SOLVER_TOLERANCE};
use crate::error::{Error, Result};

/// Fixes `a_mode` (1-based) at `amplitude` and lets `Ω` vary instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pin {
    pub mode: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Evaluation nodes; `None` uses `8·J·m`.
    pub n_theta: Option<usize>,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Forward-difference step relative to `max(|x_i|, 1)`.
    pub fd_step: f64,
    /// Condition number above which the Jacobian counts as singular.
    pub max_condition: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            n_theta: None,
            tolerance: SOLVER_TOLERANCE,
            max_iterations: 30,
            fd_step: 1e-6,
            max_condition: 1e10,
            max_halvings: 30,
        }
    }
}

/// Maps the unknown vector to `(Ω, boundary)` and back.
struct Unknowns<'a> {
    template: &'a FourierBoundary,
    omega: f64,
    pin: Option<Pin>,
}

impl Unknowns<'_> {
    fn pack(&self, omega: f64, a: &[f64]) -> Vec<f64> {
        match self.pin {
            None => a.to_vec(),
            Some(p) => std::iter::once(omega).chain(a.iter().enumerate().filter(|(j, _)| j + 1 != p.mode).map(|(_, v)| *v)).collect(),
        }
    }

    fn unpack(&self, x: &[f64]) -> Result<(f64, FourierBoundary)> {
        match self.pin {
            None => Ok((self.omega, self.template.with_coefficients(x.to_vec())?)),
            Some(p) => {
                let mut a = Vec::with_capacity(self.template.modes());
                let mut rest = x[1..].iter();
                for j in 1..=self.template.modes() {
                    a.push(if j == p.mode { p.amplitude } else { *rest.next().expect("one unknown per free mode") });
                }
                Ok((x[0], self.template.with_coefficients(a)?))
            }
        }
    }
}

fn evaluate(u: &Unknowns, x: &[f64], n_theta: usize) -> Result<Vec<f64>> {
    let (omega, fb) = u.unpack(x)?;
    vstate_residual(&fb, omega, n_theta)
}

/// Forward-difference Jacobian, one column per unknown.
fn jacobian(u: &Unknowns, x: &[f64], f0: &[f64], n_theta: usize, step: f64) -> Result<DMatrix<f64>> {
    let cols = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let h = step * x[i].abs().max(1.0);
            let mut xp = x.to_vec();
            xp[i] += h;
            let f = evaluate(u, &xp, n_theta)?;
            Ok(f.iter().zip(f0).map(|(a, b)| (a - b) / h).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(DMatrix::from_fn(f0.len(), x.len(), |r, c| cols[c][r]))
}

/// Forward-difference Jacobian of the unpinned residual at `boundary`, `Ω` fixed.
pub(super) fn radial_jacobian(boundary: &FourierBoundary, omega: f64, step: f64) -> Result<DMatrix<f64>> {
    let u = Unknowns { template: boundary, omega, pin: None };
    let n_theta = boundary.default_n_theta();
    let x = boundary.coefficients().to_vec();
    let f0 = evaluate(&u, &x, n_theta)?;
    jacobian(&u, &x, &f0, n_theta, step)
}

/// Newton iteration on the residual with default options.
pub fn newton_solve(start: &FourierBoundary, omega: f64, pin: Option<Pin>) -> Result<BranchPoint> {
    newton_solve_with(start, omega, pin, &NewtonOptions::default())
}

/// Damped Newton iteration with a finite-difference Jacobian.
///
/// Without a pin `Ω` is fixed and all `J` coefficients are unknown. With a pin
/// the pinned coefficient is held and `Ω` joins the unknowns, keeping the
/// system square.
pub fn newton_solve_with(start: &FourierBoundary, omega: f64, pin: Option<Pin>, opts: &NewtonOptions) -> Result<BranchPoint> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("angular velocity {omega} is not finite")));
    }
    if let Some(p) = pin {
        if p.mode == 0 || p.mode > start.modes() || !p.amplitude.is_finite() {
            return Err(Error::Domain(format!("cannot pin mode {} at {} with {} modes", p.mode, p.amplitude, start.modes())));
        }
    }
    let n_theta = opts.n_theta.unwrap_or_else(|| start.default_n_theta());
    let u = Unknowns { template: start, omega, pin };
    let mut x = u.pack(omega, start.coefficients());
    // The pinned start must itself be a valid boundary.
    let mut f = evaluate(&u, &x, n_theta)?;
    let mut fnorm = norm(&f);
    let mut trace = vec![fnorm];
    for it in 0..=opts.max_iterations {
        if fnorm <= opts.tolerance {
            let (omega, boundary) = u.unpack(&x)?;
            return Ok(BranchPoint { omega, amplitude: boundary.amplitude(), boundary, residual_norm: fnorm, iterations: it });
        }
        if it == opts.max_iterations {
            break;
        }
        let jac = jacobian(&u, &x, &f, n_theta, opts.fd_step)?;
        let sv = jac.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || smax / smin > opts.max_condition {
            return Err(Error::BifurcationProximity { condition: smax / smin });
        }
        let rhs = -DVector::from_vec(f.clone());
        let dx = jac.lu().solve(&rhs).ok_or(Error::BifurcationProximity { condition: f64::INFINITY })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            match evaluate(&u, &trial, n_theta) {
                Ok(ft) if norm(&ft) < fnorm => {
                    accepted = Some((trial, ft));
                    break;
                }
                Ok(_) | Err(Error::Geometry(_)) => lambda *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some((xn, fnew)) = accepted else { break };
        x = xn;
        f = fnew;
        fnorm = norm(&f);
        trace.push(fnorm);
    }
    Err(Error::NoConvergence { iterations: trace.len() - 1, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start(a1: f64) -> FourierBoundary {
        let mut a = vec![0.0; 4];
        a[0] = a1;
        FourierBoundary::new(0.5, 3, a).unwrap()
    }

    #[test]
    fn collapses_to_the_disc_above_the_window() {
        let p = newton_solve(&start(1e-2), 0.7, None).unwrap();
        assert!(p.residual_norm <= 1e-8);
        assert!(p.max_coefficient() < 1e-7, "{:?}", p.boundary);
        assert_eq!(p.omega, 0.7);
    }

    #[test]
    fn collapses_to_the_disc_below_the_window() {
        let p = newton_solve(&start(1e-2), -0.2, None).unwrap();
        assert!(p.max_coefficient() < 1e-7, "{:?}", p.boundary);
    }

    #[test]
    fn disc_is_returned_immediately() {
        let p = newton_solve(&start(0.0), 0.1, None).unwrap();
        assert_eq!(p.iterations, 0);
        assert_eq!(p.amplitude, 0.0);
    }

    #[test]
    fn bad_pins_are_refused() {
        assert!(newton_solve(&start(1e-2), 0.3, Some(Pin { mode: 0, amplitude: 1e-2 })).is_err());
        assert!(newton_solve(&start(1e-2), 0.3, Some(Pin { mode: 5, amplitude: 1e-2 })).is_err());
    }

    #[test]
    fn iteration_budget_is_reported_with_a_trace() {
        let opts = NewtonOptions { max_iterations: 1, tolerance: 1e-30, ..NewtonOptions::default() };
        match newton_solve_with(&start(5e-2), -0.2, None, &opts) {
            Err(Error::NoConvergence { iterations, trace }) => {
                assert_eq!(iterations, 1);
                assert_eq!(trace.len(), 2);
                assert!(trace[1] < trace[0]);
            }
            other => panic!("{other:?}"),
        }
    }
}
