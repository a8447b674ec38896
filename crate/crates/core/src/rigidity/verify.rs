use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::osmall::{energy_criteria, energy_stationarity, OSmallReport, OVerdict};
use super::step::step_approximation;
use super::{build_relative_stream, build_smooth_stream, dyadic_t_grid, Regime, RotatingPatchProblem, RotatingSmoothProblem, WorkingField};
use crate::csts::{csts_field, dirichlet_energy};
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::patch::{classify, radiality_measure, BoundarySamples, PatchClass};
use crate::symmetry::{check_all_directions, radial_verdict, weak_superharmonic_defect};

/// Resolution and tolerances of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Odd grid size.
    pub n: usize,
    /// Directions `kπ/n_dirs` swept by the energy and symmetry stages.
    pub n_dirs: usize,
    pub t_grid: Vec<f64>,
    /// Absolute part of the local-symmetry mismatch tolerance.
    pub symmetry_tol: f64,
    /// Tolerance of the radial verdict and of the superharmonicity defect `-h²Δ_h u`.
    pub radial_tol: f64,
    /// Largest admissible oscillation of `𝒢[ω] + (Ω/2)|x|²` on a boundary curve.
    pub residual_tol: f64,
    pub samples_per_edge: usize,
    /// Number of bands in the step approximation of a smooth vorticity.
    pub step_k: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 257,
            n_dirs: 16,
            t_grid: dyadic_t_grid(3, 10),
            symmetry_tol: 1e-3,
            radial_tol: 1e-6,
            residual_tol: 1e-6,
            samples_per_edge: 2,
            step_k: 8,
        }
    }
}

impl VerifyConfig {
    /// Rejects grids, direction counts, tolerances and t-grids the pipeline cannot use.
    pub fn validate(&self) -> Result<()> {
        super::osmall::check_t_grid(&self.t_grid)?;
        if self.step_k < 2 {
            return Err(Error::Domain(format!("step count {} is below 2", self.step_k)));
        }
        if self.n < 65 || self.n % 2 == 0 {
            return Err(Error::Domain(format!("grid size {} must be odd and at least 65", self.n)));
        }
        if self.n_dirs < 8 {
            return Err(Error::Domain(format!("need at least 8 directions, got {}", self.n_dirs)));
        }
        for (name, v) in [("symmetry_tol", self.symmetry_tol), ("radial_tol", self.radial_tol), ("residual_tol", self.residual_tol)] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn directions(&self) -> Vec<f64> {
        (0..self.n_dirs).map(|k| std::f64::consts::PI * k as f64 / self.n_dirs as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub data: Value,
}

impl Stage {
    fn new(name: &str, status: StageStatus, data: Value) -> Self {
        Stage { name: name.into(), status, data }
    }

    fn from_result(name: &str, r: Result<(StageStatus, Value)>) -> Self {
        match r {
            Ok((status, data)) => Stage::new(name, status, data),
            Err(e) => Stage::new(name, StageStatus::Fail, json!({ "error": e.to_string() })),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentRadial,
    Inconsistent,
    /// No stage failed but some could not decide.
    Inconclusive,
    WindowRegimeUntested,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ConsistentRadial => "consistent-radial",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
            Verdict::WindowRegimeUntested => "window-regime-untested",
        })
    }
}

/// Outcome of a verification pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub regime: Regime,
    pub omega: f64,
    pub stages: Vec<Stage>,
    pub verdict: Verdict,
    /// First failing stage in pipeline order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_stage: Option<String>,
    /// Energy-deficit reports by direction, for plotting.
    #[serde(skip)]
    pub reports: Vec<(f64, OSmallReport)>,
}

impl VerdictRecord {
    fn window(regime: Regime, omega: f64, reason: String) -> Self {
        VerdictRecord {
            regime,
            omega,
            stages: vec![Stage::new("regime", StageStatus::Inconclusive, json!({ "reason": reason }))],
            verdict: Verdict::WindowRegimeUntested,
            failing_stage: None,
            reports: Vec::new(),
        }
    }

    fn assemble(regime: Regime, omega: f64, stages: Vec<Stage>, reports: Vec<(f64, OSmallReport)>) -> Self {
        let failing_stage = stages.iter().find(|s| s.status == StageStatus::Fail).map(|s| s.name.clone());
        let verdict = if failing_stage.is_some() {
            Verdict::Inconsistent
        } else if stages.iter().any(|s| s.status == StageStatus::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::ConsistentRadial
        };
        VerdictRecord { regime, omega, stages, verdict, failing_stage, reports }
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict records serialize")
    }
}

fn pass_if(ok: bool) -> StageStatus {
    if ok {
        StageStatus::Pass
    } else {
        StageStatus::Fail
    }
}

fn superharmonicity_stage(w: &WorkingField, tol: f64) -> Stage {
    let (defect, at) = weak_superharmonic_defect(&w.field);
    Stage::new("superharmonicity", pass_if(defect >= -tol), json!({ "min_weak_laplacian": defect, "at": [at.x1, at.x2], "tolerance": tol }))
}

fn energy_stage(w: &WorkingField, config: &VerifyConfig) -> (Stage, Vec<(f64, OSmallReport)>) {
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut error = None;
    for d in config.directions() {
        match energy_stationarity(w, d, &config.t_grid) {
            Ok(r) => {
                rows.push(json!({ "direction": d, "verdict": r.verdict, "slope": r.slope, "max_ratio": r.ratios.iter().fold(0.0f64, |m, v| m.max(v.abs())) }));
                reports.push((d, r));
            }
            Err(e) => {
                error = Some(format!("direction {d}: {e}"));
                break;
            }
        }
    }
    let status = if error.is_some() || reports.iter().any(|(_, r)| r.verdict == OVerdict::Theta) {
        StageStatus::Fail
    } else if reports.iter().all(|(_, r)| r.verdict == OVerdict::OSmall) {
        StageStatus::Pass
    } else {
        StageStatus::Inconclusive
    };
    let mut data = json!({ "directions": rows });
    if let Some(e) = error {
        data["error"] = json!(e);
    }
    (Stage::new("energy_stationarity", status, data), reports)
}

fn symmetry_stage(w: &WorkingField, config: &VerifyConfig) -> Stage {
    Stage::from_result(
        "local_symmetry",
        check_all_directions(&w.field, config.n_dirs, config.symmetry_tol).map(|reports| {
            let ok = reports.iter().all(|r| r.passed);
            (pass_if(ok), json!(reports))
        }),
    )
}

fn radial_stage(w: &WorkingField, config: &VerifyConfig) -> Stage {
    Stage::from_result(
        "radial_verdict",
        radial_verdict(&w.field, &w.rhs, config.radial_tol).map(|ok| (pass_if(ok), json!({ "radial": ok }))),
    )
}

/// Runs the rigidity pipeline on a rotating patch.
///
/// Every stage runs; the verdict is consistent-radial when all pass and
/// inconsistent, naming the first failure, otherwise. The window regime is
/// refused with an explicit status.
pub fn verify_patch_rigidity(problem: &RotatingPatchProblem, config: &VerifyConfig) -> Result<VerdictRecord> {
    config.validate()?;
    let (regime, omega) = (problem.regime(), problem.omega());
    if regime == Regime::Window {
        let reason = format!(
            "2Ω = {} lies strictly between min(0, λ) = {} and max(0, Λ) = {}: no sign of ω - 2Ω, no rigidity statement",
            2.0 * omega,
            problem.patch().lambda().min(0.0),
            problem.patch().big_lambda().max(0.0)
        );
        return Ok(VerdictRecord::window(regime, omega, reason));
    }
    let w = build_relative_stream(problem, config.n)?;
    let mut stages = vec![superharmonicity_stage(&w, config.radial_tol)];
    let (energy, reports) = energy_stage(&w, config);
    stages.push(energy);
    stages.push(symmetry_stage(&w, config));
    stages.push(radial_stage(&w, config));

    let support = problem.patch().support();
    let class = classify(&support);
    stages.push(Stage::new(
        "classify",
        pass_if(class != PatchClass::NonRadial),
        json!({ "class": class, "radiality": radiality_measure(&support) }),
    ));
    stages.push(Stage::from_result(
        "rotating_residual",
        BoundarySamples::weighted(problem.patch(), config.samples_per_edge).map(|b| {
            let r = b.residual(omega);
            (pass_if(r.max_deviation <= config.residual_tol), json!({ "max_deviation": r.max_deviation, "tolerance": config.residual_tol }))
        }),
    ));
    Ok(VerdictRecord::assemble(regime, omega, stages, reports))
}

/// `max |ω₀(x) - ω₀(Rx)|` over nodes and sixteen rotations `R`, bilinearly sampled.
fn rotational_spread(omega0: &GridField) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..omega0.values().len() {
        if !omega0.mask()[k] {
            continue;
        }
        let p = omega0.point_at(k);
        if p.norm() > 1.0 - 2.0 * omega0.h() {
            continue;
        }
        let v = omega0.values()[k];
        for r in 1..16 {
            let q = p.rotate(std::f64::consts::PI * r as f64 / 8.0);
            worst = worst.max((omega0.sample(q) - v).abs());
        }
    }
    worst
}

/// `𝓘(t) = ∫ ω₀(u^t - u)` along `x₁`, and the split `𝓘 = 𝓘₁ + 𝓘₂` through the step function.
fn interaction_stages(problem: &RotatingSmoothProblem, w: &WorkingField, config: &VerifyConfig) -> Result<(Stage, Stage)> {
    let omega0 = problem.omega0();
    let u = &w.field;
    let h2 = u.h() * u.h();
    let step = step_approximation(omega0, config.step_k);
    let mut q = Vec::new();
    let mut splits = Vec::new();
    let mut split_ok = true;
    let area = omega0.mask().iter().filter(|&&m| m).count() as f64 * h2;
    for &t in &config.t_grid {
        let diff = csts_field(u, t)?.zip_map(u, |a, b| a - b)?;
        let total: f64 = omega0.zip_map(&diff, |a, b| a * b)?.integral();
        q.push(total);
        if let Ok(s) = &step {
            let i2: f64 = s.field.zip_map(&diff, |a, b| a * b)?.integral();
            let i1 = total - i2;
            let bound = area * omega0.sup_distance(&s.field)? * diff.sup_abs();
            let ok = i1.abs() <= bound * (1.0 + 1e-12) + 1e-300;
            split_ok &= ok;
            splits.push(json!({ "t": t, "i1": i1, "i2": i2, "bound": bound, "holds": ok }));
        }
    }
    let scale = omega0.zip_map(u, |a, b| (a * b).abs())?.integral().max(dirichlet_energy(u));
    let base = energy_criteria(scale, u.h());
    let report = OSmallReport::new(config.t_grid.clone(), q, base)?;
    let status = match report.verdict {
        OVerdict::OSmall => StageStatus::Pass,
        OVerdict::Theta => StageStatus::Fail,
        OVerdict::Inconclusive => StageStatus::Inconclusive,
    };
    let interaction = Stage::new("interaction_integral", status, json!(report));
    let constant = problem.lower_threshold() == problem.upper_threshold();
    let split = match step {
        // A constant ω₀ is its own one-band step function, so 𝓘₁ vanishes identically.
        Err(_) if constant => Stage::new("step_splitting", StageStatus::Pass, json!({ "k": 1, "sup_error": 0.0, "constant": true })),
        Ok(s) => Stage::new(
            "step_splitting",
            pass_if(split_ok && s.satisfied),
            json!({ "k": s.k, "sup_error": s.sup_error, "bound": s.bound, "splits": splits }),
        ),
        Err(e) => Stage::new("step_splitting", StageStatus::Inconclusive, json!({ "error": e.to_string() })),
    };
    Ok((interaction, split))
}

/// Runs the rigidity pipeline on a smooth rotating vorticity.
pub fn verify_smooth_rigidity(problem: &RotatingSmoothProblem, config: &VerifyConfig) -> Result<VerdictRecord> {
    config.validate()?;
    if problem.omega0().n() != config.n {
        return Err(Error::Domain(format!("vorticity sampled at n = {}, config asks for {}", problem.omega0().n(), config.n)));
    }
    let (regime, omega) = (problem.regime(), problem.omega());
    if regime == Regime::Window {
        let reason = format!(
            "Ω = {omega} lies strictly between inf ω₀/2 = {} and sup ω₀/2 = {}: no rigidity statement",
            problem.lower_threshold(),
            problem.upper_threshold()
        );
        return Ok(VerdictRecord::window(regime, omega, reason));
    }
    let w = build_smooth_stream(problem)?;
    let mut stages = vec![superharmonicity_stage(&w, config.radial_tol)];
    let (energy, reports) = energy_stage(&w, config);
    stages.push(energy);
    let (interaction, split) = interaction_stages(problem, &w, config)?;
    stages.push(interaction);
    stages.push(split);
    stages.push(symmetry_stage(&w, config));
    stages.push(radial_stage(&w, config));
    let omega0 = problem.omega0();
    let spread = rotational_spread(omega0);
    let allowed = config.symmetry_tol + 2.0 * omega0.h() * omega0.discrete_lipschitz();
    stages.push(Stage::new("vorticity_radiality", pass_if(spread <= allowed), json!({ "spread": spread, "tolerance": allowed })));
    Ok(VerdictRecord::assemble(regime, omega, stages, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::patch::{JordanPolygon, PatchComponent, PatchSpec};

    fn coarse() -> VerifyConfig {
        VerifyConfig { n: 129, n_dirs: 8, ..VerifyConfig::default() }
    }

    fn run(patch: PatchComponent, omega: f64) -> VerdictRecord {
        let p = PatchSpec::single(patch).unwrap();
        verify_patch_rigidity(&RotatingPatchProblem::new(&p, omega).unwrap(), &coarse()).unwrap()
    }

    #[test]
    fn config_is_validated() {
        assert!(VerifyConfig::default().validate().is_ok());
        for bad in [
            VerifyConfig { n: 128, ..coarse() },
            VerifyConfig { n_dirs: 4, ..coarse() },
            VerifyConfig { radial_tol: 0.0, ..coarse() },
            VerifyConfig { t_grid: vec![0.1, 0.05], ..coarse() },
            VerifyConfig { step_k: 1, ..coarse() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn centred_annulus_is_consistent() {
        let r = run(PatchComponent::annulus(Point2::ORIGIN, 0.25, 0.5, 2048).unwrap(), -1.0);
        assert_eq!(r.verdict, Verdict::ConsistentRadial, "{}", r.to_json());
        assert!(r.failing_stage.is_none());
        assert_eq!(r.stages.len(), 6);
    }

    #[test]
    fn off_centre_disc_is_inconsistent() {
        let r = run(PatchComponent::disc(Point2::new(0.25, 0.0), 0.2, 1024).unwrap(), -0.5);
        assert_eq!(r.verdict, Verdict::Inconsistent);
        assert_eq!(r.failing_stage.as_deref(), Some("energy_stationarity"));
        assert_eq!(r.stage("rotating_residual").unwrap().status, StageStatus::Fail);
    }

    #[test]
    fn window_is_refused_without_running_stages() {
        let ell = PatchComponent::simple(JordanPolygon::ellipse(Point2::ORIGIN, 0.35, 0.25, 0.0, 256).unwrap());
        let r = run(ell, 0.25);
        assert_eq!(r.verdict, Verdict::WindowRegimeUntested);
        assert_eq!(r.regime, Regime::Window);
        assert!(r.stages.iter().all(|s| s.status != StageStatus::Pass));
    }

    #[test]
    fn constant_vorticity_is_consistent() {
        let one = GridField::from_fn(129, |_| 1.0).unwrap();
        let r = verify_smooth_rigidity(&RotatingSmoothProblem::new(one, -1.0).unwrap(), &coarse()).unwrap();
        assert_eq!(r.verdict, Verdict::ConsistentRadial, "{}", r.to_json());
    }

    #[test]
    fn smooth_grid_must_match_the_config() {
        let one = GridField::from_fn(65, |_| 1.0).unwrap();
        assert!(verify_smooth_rigidity(&RotatingSmoothProblem::new(one, -1.0).unwrap(), &coarse()).is_err());
    }

    #[test]
    fn record_serializes_verdict_and_stages() {
        let r = run(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048).unwrap(), 0.25);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"], "window-regime-untested");
        assert_eq!(v["regime"], "window");
        assert!(v["stages"].is_array());
    }
}
