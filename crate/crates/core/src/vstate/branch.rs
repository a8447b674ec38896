use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

use super::newton::radial_jacobian;
use super::{newton_solve, BranchPoint, FourierBoundary, NewtonOptions, Pin, DEFAULT_MODES};
use crate::error::{Error, Result};

/// Smallest singular value and determinant sign of the radial Jacobian at one `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub omega: f64,
    pub sigma_min: f64,
    pub det_sign: i8,
}

/// A root of `det J(Ω)` at the disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub omega: f64,
    /// Mode (1-based) carrying the largest share of the null vector.
    pub dominant_mode: usize,
    /// `|v_1|` of the unit null vector.
    pub fundamental_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub b: f64,
    pub m: usize,
    pub modes: usize,
    pub samples: Vec<ScanSample>,
    /// Every crossing, including those of the harmonics `j·m`, `j ≥ 2`.
    pub crossings: Vec<Crossing>,
    /// Crossings of the fundamental `m`-fold mode.
    pub candidates: Vec<f64>,
}

fn check_scan(b: f64, m: usize, range: (f64, f64), steps: usize) -> Result<()> {
    if !(b > 0.0 && b < 1.0) || m == 0 {
        return Err(Error::Domain(format!("need 0 < b < 1 and m ≥ 1, got b = {b}, m = {m}")));
    }
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) || steps == 0 {
        return Err(Error::Domain(format!("empty scan range {range:?} with {steps} steps")));
    }
    Ok(())
}

/// Tracks the Jacobian at the disc across `range` and bisects every sign change of its determinant.
///
/// The residual is affine in `Ω`, so `J(Ω) = J(0) + Ω (J(1) - J(0))` is exact
/// and only two Jacobians are computed.
pub fn bifurcation_scan_report(b: f64, m: usize, modes: usize, range: (f64, f64), steps: usize) -> Result<ScanReport> {
    check_scan(b, m, range, steps)?;
    let disc = FourierBoundary::circle(b, m, modes)?;
    let step = NewtonOptions::default().fd_step;
    let j0 = radial_jacobian(&disc, 0.0, step)?;
    let slope = radial_jacobian(&disc, 1.0, step)? - &j0;
    let at = |om: f64| -> DMatrix<f64> { &j0 + om * &slope };
    let det = |om: f64| at(om).determinant();
    let sign = |d: f64| if d > 0.0 { 1i8 } else if d < 0.0 { -1 } else { 0 };
    let samples: Vec<ScanSample> = (0..=steps)
        .map(|s| {
            let om = range.0 + (range.1 - range.0) * s as f64 / steps as f64;
            let mat = at(om);
            ScanSample { omega: om, sigma_min: mat.clone().singular_values().min(), det_sign: sign(mat.determinant()) }
        })
        .collect();
    let mut crossings = Vec::new();
    for w in samples.windows(2) {
        let (mut lo, mut hi) = (w[0].omega, w[1].omega);
        let omega = match (w[0].det_sign, w[1].det_sign) {
            (0, _) => lo,
            (a, c) if a * c < 0 => {
                let s_lo = a;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if sign(det(mid)) == s_lo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            _ => continue,
        };
        let svd = at(omega).svd(false, true);
        let vt = svd.v_t.expect("requested right singular vectors");
        let k = svd.singular_values.imin();
        let v: Vec<f64> = vt.row(k).iter().copied().collect();
        let dominant_mode = v.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map(|(i, _)| i + 1).unwrap_or(1);
        crossings.push(Crossing { omega, dominant_mode, fundamental_weight: v[0].abs() });
    }
    if samples.last().map(|s| s.det_sign) == Some(0) {
        let omega = range.1;
        crossings.push(Crossing { omega, dominant_mode: 1, fundamental_weight: f64::NAN });
    }
    let candidates = crossings.iter().filter(|c| c.dominant_mode == 1).map(|c| c.omega).collect();
    Ok(ScanReport { b, m, modes, samples, crossings, candidates })
}

/// Bifurcation values of the fundamental `m`-fold mode from the disc of radius `b` in `range`.
pub fn bifurcation_scan(b: f64, m: usize, range: (f64, f64), steps: usize) -> Result<Vec<f64>> {
    Ok(bifurcation_scan_report(b, m, DEFAULT_MODES, range, steps)?.candidates)
}

/// Continued solutions with the reason continuation stopped early, if it did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub stopped: Option<String>,
}

/// Solves the pinned system at `a₁ = amplitude` starting from the disc at `omega_star`.
pub fn seed_branch(b: f64, m: usize, modes: usize, omega_star: f64, amplitude: f64) -> Result<BranchPoint> {
    let mut a = vec![0.0; modes];
    a[0] = amplitude;
    let start = FourierBoundary::new(b, m, a)?;
    newton_solve(&start, omega_star, Some(Pin { mode: 1, amplitude }))
}

/// Raises `a₁` by `step` `count` times, re-solving for `(Ω, a₂, …, a_J)` each time.
///
/// The next start is the secant extrapolation of the last two points. A
/// geometry or convergence failure ends the branch and is recorded.
pub fn continue_branch(seed: &BranchPoint, step: f64, count: usize) -> Result<Branch> {
    if !(seed.amplitude > 0.0) {
        return Err(Error::Domain("continuation needs a non-radial seed".into()));
    }
    if !step.is_finite() {
        return Err(Error::Domain(format!("step {step} is not finite")));
    }
    let mut points = vec![seed.clone()];
    let mut stopped = None;
    for _ in 0..count {
        let last = points.last().expect("seeded");
        let a1 = last.boundary.coefficients()[0] + step;
        let (omega, mut a) = match points.len() {
            1 => (last.omega, last.boundary.coefficients().to_vec()),
            k => {
                let prev = &points[k - 2];
                let ds = last.boundary.coefficients()[0] - prev.boundary.coefficients()[0];
                let r = if ds != 0.0 { step / ds } else { 0.0 };
                let a: Vec<f64> = last
                    .boundary
                    .coefficients()
                    .iter()
                    .zip(prev.boundary.coefficients())
                    .map(|(x, y)| x + r * (x - y))
                    .collect();
                (last.omega + r * (last.omega - prev.omega), a)
            }
        };
        a[0] = a1;
        let next = last.boundary.with_coefficients(a).and_then(|start| newton_solve(&start, omega, Some(Pin { mode: 1, amplitude: a1 })));
        match next {
            Ok(p) => points.push(p),
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        }
    }
    Ok(Branch { points, stopped })
}

/// Result of one Newton solve from a random perturbation of the disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub omega: f64,
    pub trial: usize,
    pub start_max_coefficient: f64,
    /// `max_j |a_j|` at convergence; `NaN` when the solve failed.
    pub final_max_coefficient: f64,
    pub residual_norm: f64,
    pub error: Option<String>,
}

impl SweepOutcome {
    /// Converged to a boundary with every `|a_j|` below `1e-4`.
    pub fn is_radial(&self) -> bool {
        self.error.is_none() && self.final_max_coefficient < 1e-4
    }
}

/// Newton solves at fixed `Ω` from `trials` random starts `a_j ∈ [-perturbation, perturbation]`.
pub fn radial_sweep(b: f64, m: usize, modes: usize, omegas: &[f64], trials: usize, perturbation: f64, seed: u64) -> Result<Vec<SweepOutcome>> {
    let disc = FourierBoundary::circle(b, m, modes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &omega in omegas {
        for trial in 0..trials {
            let a: Vec<f64> = (0..modes).map(|_| rng.gen_range(-perturbation..=perturbation)).collect();
            let start_max_coefficient = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let start = disc.with_coefficients(a)?;
            let outcome = match newton_solve(&start, omega, None) {
                Ok(p) => SweepOutcome {
                    omega,
                    trial,
                    start_max_coefficient,
                    final_max_coefficient: p.max_coefficient(),
                    residual_norm: p.residual_norm,
                    error: None,
                },
                Err(e) => SweepOutcome {
                    omega,
                    trial,
                    start_max_coefficient,
                    final_max_coefficient: f64::NAN,
                    residual_norm: f64::NAN,
                    error: Some(e.to_string()),
                },
            };
            out.push(outcome);
        }
    }
    Ok(out)
}

/// Rows `omega,amplitude,residual_norm,a1,…,aJ`.
pub fn write_branch_csv<W: Write>(points: &[BranchPoint], mut w: W) -> Result<()> {
    let modes = points.first().map_or(0, |p| p.boundary.modes());
    let mut header = String::from("omega,amplitude,residual_norm");
    for j in 1..=modes {
        header.push_str(&format!(",a{j}"));
    }
    writeln!(w, "{header}")?;
    for p in points {
        let mut row = format!("{:e},{:e},{:e}", p.omega, p.amplitude, p.residual_norm);
        for a in p.boundary.coefficients() {
            row.push_str(&format!(",{a:e}"));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// A gnuplot script drawing `|a₁|` against `Ω` for each branch file, with the window edges marked.
pub fn gnuplot_script(branch_files: &[String]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set xlabel 'Omega'\nset ylabel '|a_1|'\n");
    s.push_str("set arrow from 0, graph 0 to 0, graph 1 nohead dashtype 2\n");
    s.push_str("set arrow from 0.5, graph 0 to 0.5, graph 1 nohead dashtype 2\n");
    if branch_files.is_empty() {
        s.push_str("# no branches\n");
        return s;
    }
    let plots: Vec<String> =
        branch_files.iter().enumerate().map(|(k, f)| format!("'{f}' using 1:2 with linespoints title 'branch {}'", k + 1)).collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_arguments_are_checked() {
        assert!(bifurcation_scan(1.0, 3, (0.0, 1.0), 10).is_err());
        assert!(bifurcation_scan(0.5, 0, (0.0, 1.0), 10).is_err());
        assert!(bifurcation_scan(0.5, 3, (1.0, 0.0), 10).is_err());
        assert!(bifurcation_scan(0.5, 3, (0.0, 1.0), 0).is_err());
    }

    #[test]
    fn continuation_needs_a_non_radial_seed() {
        let disc = FourierBoundary::circle(0.5, 3, 2).unwrap();
        let p = BranchPoint { omega: 0.3, boundary: disc, residual_norm: 0.0, amplitude: 0.0, iterations: 0 };
        assert!(continue_branch(&p, 1e-3, 3).is_err());
    }

    #[test]
    fn csv_and_script() {
        let fb = FourierBoundary::new(0.5, 3, vec![0.01, -0.002]).unwrap();
        let p = BranchPoint { omega: 0.25, amplitude: 0.01, boundary: fb, residual_norm: 1e-10, iterations: 3 };
        let mut buf = Vec::new();
        write_branch_csv(&[p], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "omega,amplitude,residual_norm,a1,a2\n2.5e-1,1e-2,1e-10,1e-2,-2e-3\n");
        let gp = gnuplot_script(&["branch_1.csv".to_string()]);
        assert!(gp.contains("plot 'branch_1.csv' using 1:2"));
        assert!(gnuplot_script(&[]).contains("no branches"));
    }
}
