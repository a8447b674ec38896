//! The verification pipeline for uniformly rotating solutions: relative
//! stream functions, the energy criterion, key-lemma integrals and verdicts.

mod osmall;
mod step;
mod verify;

pub use osmall::{
    clamp_t_grid, dyadic_t_grid, energy_stationarity, energy_stationarity_with, lemma_key1_check, lemma_key2_check,
    split_decomposition_integral, absolute_change_inside, energy_criteria, OCriteria, OSmallReport, OVerdict, DECAY_FACTOR,
};

pub use step::{step_approximation, StepApproximation};
pub use verify::{
    verify_patch_rigidity, verify_smooth_rigidity, Stage, StageStatus, Verdict, VerdictRecord, VerifyConfig,
};

use serde::{Deserialize, Serialize};

use crate::disc_potential::solve_dirichlet;
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::patch::{area_weighted_density, MultiScalePatch, PatchSpec};

/// Sign regime of `ω - 2Ω` over the whole disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `ω - 2Ω ≥ 0`: the relative stream function is superharmonic.
    Superharmonic,
    /// `ω - 2Ω ≤ 0`: its negative is.
    Subharmonic,
    /// Neither sign holds; no rigidity conclusion is available.
    Window,
}

impl Regime {
    /// Regime for a vorticity with values in `[lo, hi]` on the disc.
    pub fn from_range(lo: f64, hi: f64, omega: f64) -> Regime {
        if 2.0 * omega <= lo {
            Regime::Superharmonic
        } else if 2.0 * omega >= hi {
            Regime::Subharmonic
        } else {
            Regime::Window
        }
    }

    /// `+1` or `-1`, the factor turning `u` into the superharmonic working field.
    pub fn sign(self) -> f64 {
        match self {
            Regime::Subharmonic => -1.0,
            _ => 1.0,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Superharmonic => "superharmonic",
            Regime::Subharmonic => "subharmonic",
            Regime::Window => "window",
        })
    }
}

/// A weighted patch `ω = Σ α_i 1_{D_i}` rotating at angular velocity `Ω`.
#[derive(Debug, Clone)]
pub struct RotatingPatchProblem {
    patch: MultiScalePatch,
    omega: f64,
    regime: Regime,
}

impl RotatingPatchProblem {
    pub fn new(patch: &PatchSpec, omega: f64) -> Result<Self> {
        Self::multiscale(MultiScalePatch::from_patch(patch), omega)
    }

    pub fn multiscale(patch: MultiScalePatch, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::Domain(format!("angular velocity {omega} is not finite")));
        }
        if patch.terms().is_empty() {
            return Err(Error::Domain("the patch has no components".into()));
        }
        // ω vanishes off the patch, so 0 always belongs to its range.
        let lo = patch.lambda().min(0.0);
        let hi = patch.big_lambda().max(0.0);
        Ok(RotatingPatchProblem { patch, omega, regime: Regime::from_range(lo, hi, omega) })
    }

    pub fn patch(&self) -> &MultiScalePatch {
        &self.patch
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `ω - 2Ω` on the grid, cell-averaged on the patch.
    pub fn relative_vorticity(&self, n: usize) -> Result<GridField> {
        let template = GridField::zeros(n)?;
        let density = area_weighted_density(&self.patch, &template);
        Ok(density.map(|w| w - 2.0 * self.omega))
    }
}

/// A smooth vorticity sample rotating at `Ω`.
#[derive(Debug, Clone)]
pub struct RotatingSmoothProblem {
    omega0: GridField,
    omega: f64,
    regime: Regime,
}

impl RotatingSmoothProblem {
    pub fn new(omega0: GridField, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::Domain(format!("angular velocity {omega} is not finite")));
        }
        if let Some(v) = omega0.values().iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("vorticity sample {v} is not finite")));
        }
        let regime = Regime::from_range(omega0.inf(), omega0.sup(), omega);
        Ok(RotatingSmoothProblem { omega0, omega, regime })
    }

    pub fn omega0(&self) -> &GridField {
        &self.omega0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `inf ω₀ / 2`, the lower end of the window.
    pub fn lower_threshold(&self) -> f64 {
        0.5 * self.omega0.inf()
    }

    /// `sup ω₀ / 2`, the upper end of the window.
    pub fn upper_threshold(&self) -> f64 {
        0.5 * self.omega0.sup()
    }

    pub fn relative_vorticity(&self) -> GridField {
        self.omega0.map(|w| w - 2.0 * self.omega)
    }
}

/// The field the pipeline symmetrizes: `±𝒢[ω - 2Ω]`, signed to be superharmonic when possible.
#[derive(Debug, Clone)]
pub struct WorkingField {
    pub field: GridField,
    /// `-Δ` of `field`, i.e. `±(ω - 2Ω)`.
    pub rhs: GridField,
    pub regime: Regime,
    /// Set in the window regime, where no sign makes the field superharmonic.
    pub warning: Option<String>,
}

impl WorkingField {
    fn from_rhs(relative: GridField, regime: Regime) -> Result<Self> {
        let s = regime.sign();
        let rhs = relative.map(|v| s * v);
        let mut field = solve_dirichlet(&rhs)?.0;
        let warning = match regime {
            Regime::Window => Some("window regime: ω - 2Ω changes sign, the field is not superharmonic".to_string()),
            _ => {
                // Round-off from the solver may leave values a hair below zero.
                let floor = -1e-12 * field.sup_abs().max(f64::MIN_POSITIVE);
                if let Some(k) = (0..field.values().len()).find(|&k| field.mask()[k] && field.values()[k] < floor) {
                    return Err(Error::Precondition(format!(
                        "{regime} working field is negative ({}) at {}",
                        field.values()[k],
                        field.point_at(k)
                    )));
                }
                field = field.map(|v| v.max(0.0));
                None
            }
        };
        Ok(WorkingField { field, rhs, regime, warning })
    }

    /// The field shifted to be non-negative, for diagnostics in the window regime.
    pub fn nonnegative(&self) -> (GridField, bool) {
        let m = self.field.inf();
        if m < 0.0 {
            (self.field.map(|v| v - m), true)
        } else {
            (self.field.clone(), false)
        }
    }
}

/// `u = 𝒢[ω - 2Ω]`, or `ψ = -u` in the subharmonic regime.
pub fn build_relative_stream(problem: &RotatingPatchProblem, n: usize) -> Result<WorkingField> {
    if n < 65 {
        return Err(Error::Domain(format!("grid size {n} is below 65")));
    }
    WorkingField::from_rhs(problem.relative_vorticity(n)?, problem.regime)
}

/// `u = 𝒢[ω₀] + Ω(|x|² - 1)/2 = 𝒢[ω₀ - 2Ω]`, sign-flipped above the window.
pub fn build_smooth_stream(problem: &RotatingSmoothProblem) -> Result<WorkingField> {
    WorkingField::from_rhs(problem.relative_vorticity(), problem.regime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc_potential::stream_radial;
    use crate::geometry::Point2;
    use crate::patch::PatchComponent;

    fn disc(c: Point2, r: f64) -> PatchComponent {
        PatchComponent::disc(c, r, 2048).unwrap()
    }

    fn sup_error(w: &GridField, oracle: impl Fn(Point2) -> f64) -> f64 {
        (0..w.values().len()).filter(|&k| w.mask()[k]).map(|k| (w.values()[k] - oracle(w.point_at(k))).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn plain_patch_regimes() {
        let p = PatchSpec::single(disc(Point2::ORIGIN, 0.5)).unwrap();
        let regime = |om| RotatingPatchProblem::new(&p, om).unwrap().regime();
        assert_eq!(regime(-1.0), Regime::Superharmonic);
        assert_eq!(regime(0.0), Regime::Superharmonic);
        assert_eq!(regime(0.25), Regime::Window);
        assert_eq!(regime(0.5), Regime::Subharmonic);
        assert!(RotatingPatchProblem::new(&p, f64::NAN).is_err());
    }

    #[test]
    fn superharmonic_disc_matches_closed_form() {
        let p = PatchSpec::single(disc(Point2::ORIGIN, 0.5)).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&p, -0.3).unwrap(), 129).unwrap();
        assert!(w.warning.is_none());
        let err = sup_error(&w.field, |x| stream_radial(0.5, x).unwrap() + 0.6 * (1.0 - x.norm_sq()) / 4.0);
        assert!(err < 5e-4, "sup error {err}");
        assert!((0..w.rhs.values().len()).filter(|&k| w.rhs.mask()[k]).all(|k| w.rhs.values()[k] >= 0.6));
    }

    #[test]
    fn subharmonic_disc_is_sign_flipped() {
        let p = PatchSpec::single(disc(Point2::ORIGIN, 0.5)).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&p, 0.7).unwrap(), 129).unwrap();
        assert_eq!(w.regime, Regime::Subharmonic);
        let err = sup_error(&w.field, |x| 1.4 * (1.0 - x.norm_sq()) / 4.0 - stream_radial(0.5, x).unwrap());
        assert!(err < 5e-4, "sup error {err}");
        assert!(w.field.values().iter().all(|&v| v >= 0.0));
        let n = w.field.n();
        let interior_ok = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).all(|(i, j)| match w.field.laplacian_at(i, j) {
            Some(lap) => -lap >= -1e-6,
            None => true,
        });
        assert!(interior_ok);
    }

    #[test]
    fn stationary_stream_is_the_plain_potential() {
        let p = PatchSpec::single(disc(Point2::ORIGIN, 0.3)).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&p, 0.0).unwrap(), 129).unwrap();
        assert!(sup_error(&w.field, |x| stream_radial(0.3, x).unwrap()) < 5e-4);
        assert!(build_relative_stream(&RotatingPatchProblem::new(&p, 0.0).unwrap(), 33).is_err());
    }

    #[test]
    fn window_stream_is_flagged_and_shiftable() {
        let p = PatchSpec::single(disc(Point2::ORIGIN, 0.5)).unwrap();
        let w = build_relative_stream(&RotatingPatchProblem::new(&p, 0.3).unwrap(), 65).unwrap();
        assert!(w.warning.is_some());
        let (shifted, moved) = w.nonnegative();
        assert!(moved && shifted.inf() == 0.0);
    }

    #[test]
    fn multiscale_thresholds_follow_the_sign_of_relative_vorticity() {
        let m = MultiScalePatch::new(vec![(1.0, disc(Point2::new(-0.4, 0.0), 0.2)), (2.0, disc(Point2::new(0.4, 0.0), 0.2))]).unwrap();
        for (om, expected) in [(0.0, Regime::Superharmonic), (0.5, Regime::Window), (0.99, Regime::Window), (1.0, Regime::Subharmonic)] {
            let pr = RotatingPatchProblem::multiscale(m.clone(), om).unwrap();
            assert_eq!(pr.regime(), expected, "Ω = {om}");
            let rel = pr.relative_vorticity(65).unwrap();
            let masked: Vec<f64> = (0..rel.values().len()).filter(|&k| rel.mask()[k]).map(|k| rel.values()[k]).collect();
            let one_signed = masked.iter().all(|&v| v >= 0.0) || masked.iter().all(|&v| v <= 0.0);
            assert_eq!(one_signed, expected != Regime::Window, "Ω = {om}");
        }
        let neg = MultiScalePatch::new(vec![(-1.0, disc(Point2::ORIGIN, 0.3))]).unwrap();
        assert_eq!(RotatingPatchProblem::multiscale(neg.clone(), -0.4).unwrap().regime(), Regime::Window);
        assert_eq!(RotatingPatchProblem::multiscale(neg, -0.5).unwrap().regime(), Regime::Superharmonic);
    }

    #[test]
    fn smooth_thresholds() {
        let f = GridField::from_fn(65, |p| 1.0 + p.x1).unwrap();
        let pr = RotatingSmoothProblem::new(f.clone(), 0.0).unwrap();
        assert!((pr.lower_threshold() - 0.5 * f.inf()).abs() < 1e-15);
        assert_eq!(pr.regime(), Regime::Superharmonic);
        assert_eq!(RotatingSmoothProblem::new(f.clone(), 0.5).unwrap().regime(), Regime::Window);
        assert_eq!(RotatingSmoothProblem::new(f, 1.0).unwrap().regime(), Regime::Subharmonic);
        let bad = GridField::from_fn(65, |p| if p.x1 > 0.5 { f64::NAN } else { 0.0 }).unwrap();
        assert!(RotatingSmoothProblem::new(bad, 0.0).is_err());
    }
}
