//! Checkable forms of the rearrangement properties of the symmetrization flow,
//! shared by the property tests and the command-line suite.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::field::{csts_field, dirichlet_energy, hardy_littlewood_check, overlap, superlevel_open, DEFAULT_LEVELS};
use super::interval::{flow_pieces, flow_set, IntervalUnion};
use crate::error::Result;
use crate::geometry::Point2;
use crate::grid::GridField;

pub const EQUIMEASURE_SET_TOL: f64 = 1e-12;
pub const SEMIGROUP_TOL: f64 = 1e-10;
/// Rows may disagree by this many nodes in the measure of a super-level set.
pub const EQUIMEASURE_CELLS: usize = 3;
pub const HARDY_LITTLEWOOD_SLACK: f64 = 1e-10;
pub const ENERGY_SLACK: f64 = 1e-10;
pub const LIPSCHITZ_SLACK: f64 = 0.05;
/// Midpoint levels per field in the layer-cake products.
pub const PRODUCT_LEVELS: usize = 64;

/// One property evaluated on one input: `passed` iff `value <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl PropertyCheck {
    fn at_most(property: &'static str, value: f64, bound: f64) -> Self {
        PropertyCheck { property, value, bound, passed: value <= bound }
    }

    fn holds(property: &'static str, ok: bool) -> Self {
        Self::at_most(property, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

/// Set-flow properties for `m` and the superset `m ∪ extra` at times `s` and `t`.
pub fn interval_properties(m: &IntervalUnion, extra: &IntervalUnion, s: f64, t: f64) -> Result<Vec<PropertyCheck>> {
    let e = IntervalUnion::normalized(m.intervals().iter().chain(extra.intervals()).copied().collect())?;
    let mt = flow_set(m, t)?;
    let et = flow_set(&e, t)?;
    let chained = flow_set(&flow_set(m, s)?, t)?;
    let direct = flow_set(m, s + t)?;
    let limit = flow_set(m, f64::INFINITY)?;
    let length_drift = [&mt, &direct, &limit].iter().map(|x| (x.total_length() - m.total_length()).abs()).fold(0.0, f64::max);
    Ok(vec![
        PropertyCheck::at_most("set_equimeasurability", length_drift, EQUIMEASURE_SET_TOL),
        PropertyCheck::holds("set_monotonicity", mt.is_subset_of(&et, EQUIMEASURE_SET_TOL)),
        PropertyCheck::at_most("set_semigroup", if m.is_empty() { 0.0 } else { chained.hausdorff(&direct) }, SEMIGROUP_TOL),
    ])
}

/// Largest value step between consecutive reconstruction levels, doubled.
pub fn reconstruction_tolerance(u: &GridField) -> f64 {
    2.0 * u.sup() / DEFAULT_LEVELS as f64
}

fn support_radius(u: &GridField) -> f64 {
    u.values().iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(k, _)| u.point_at(k).norm()).fold(0.0, f64::max)
}

/// `∫ u^t v^t` as `∬ |T_t{u > a} ∩ T_t{v > b}| da db`, with the super-level
/// sets taken from the row interpolants and a midpoint rule in `a` and `b`.
pub fn layer_cake_product(u: &GridField, v: &GridField, t: f64) -> Result<f64> {
    u.check_same_grid(v)?;
    let n = u.n();
    let xs: Vec<f64> = (0..n).map(|i| u.coord(i)).collect();
    let flowed_levels = |row: &[f64]| -> (f64, Vec<Vec<(f64, f64)>>) {
        let top = row.iter().copied().fold(0.0, f64::max);
        let sets = (0..PRODUCT_LEVELS)
            .map(|k| flow_pieces(&superlevel_open(&xs, row, top * (k as f64 + 0.5) / PRODUCT_LEVELS as f64), t, None))
            .collect();
        (top / PRODUCT_LEVELS as f64, sets)
    };
    let mut total = 0.0;
    for j in 0..n {
        let (du, su) = flowed_levels(u.row(j));
        let (dv, sv) = flowed_levels(v.row(j));
        if du == 0.0 || dv == 0.0 {
            continue;
        }
        let row: f64 = su.iter().map(|a| sv.iter().map(|b| overlap(a, b)).sum::<f64>()).sum();
        total += row * du * dv;
    }
    Ok(total * u.h())
}

fn row_superlevel_counts(u: &GridField, c: f64) -> Vec<usize> {
    (0..u.n()).map(|j| u.row(j).iter().filter(|&&v| v > c).count()).collect()
}

/// Field-flow properties for `u` and `v = u + w` at time `t`.
pub fn field_properties(u: &GridField, w: &GridField, t: f64) -> Result<Vec<PropertyCheck>> {
    let v = u.zip_map(w, |a, b| a + b)?;
    let ut = csts_field(u, t)?;
    let vt = csts_field(&v, t)?;
    let (tol_u, tol_v) = (reconstruction_tolerance(u), reconstruction_tolerance(&v));
    let mut checks = Vec::new();

    checks.push(PropertyCheck::holds("identity_at_zero", csts_field(u, 0.0)? == *u));

    let top = u.sup();
    let mut worst_cells = 0usize;
    for k in 1..8 {
        let c = top * k as f64 / 8.0;
        let before = row_superlevel_counts(u, c);
        let after = row_superlevel_counts(&ut, c);
        worst_cells = before.iter().zip(&after).map(|(a, b)| a.abs_diff(*b)).fold(worst_cells, usize::max);
    }
    checks.push(PropertyCheck::at_most("field_equimeasurability", worst_cells as f64, EQUIMEASURE_CELLS as f64));

    let excess = ut.zip_map(&vt, |a, b| a - b)?.sup();
    checks.push(PropertyCheck::at_most("field_monotonicity", excess, tol_v));

    // Truncating node values differs from truncating the interpolant by up to
    // h·Lip(u), and the flow does not increase sup distances.
    let lip = u.discrete_lipschitz();
    let c = 0.5 * top;
    let cut_then_flow = csts_field(&u.map(|x| x.min(c)), t)?;
    let flow_then_cut = ut.map(|x| x.min(c));
    checks.push(PropertyCheck::at_most("truncation_commutes", cut_then_flow.sup_distance(&flow_then_cut)?, tol_u + u.h() * lip));

    let spread = ut.l1_distance(&vt)? - u.l1_distance(&v)?;
    checks.push(PropertyCheck::at_most("l1_nonexpansive", spread, PI * tol_v));

    let steps: Vec<f64> =
        (2..=8).map(|k| Ok(csts_field(u, t + 0.5f64.powi(k))?.l1_distance(&ut)?)).collect::<Result<Vec<f64>>>()?;
    checks.push(PropertyCheck::at_most("l1_continuity", steps[steps.len() - 1], 0.25 * steps[0] + PI * tol_u));

    let (sym, orig) = hardy_littlewood_check(u, &v, t)?;
    checks.push(PropertyCheck::at_most("hardy_littlewood", orig - sym, HARDY_LITTLEWOOD_SLACK));

    checks.push(PropertyCheck::at_most("energy_monotonicity", dirichlet_energy(&ut) - dirichlet_energy(u), ENERGY_SLACK));

    checks.push(PropertyCheck::at_most("lipschitz_preservation", ut.discrete_lipschitz(), lip * (1.0 + LIPSCHITZ_SLACK)));

    let radius = support_radius(u);
    checks.push(PropertyCheck::at_most("support_containment", support_radius(&ut), radius));

    checks.push(PropertyCheck::at_most("sup_bound", ut.sup_distance(u)?, lip * radius * t + tol_u));
    Ok(checks)
}

/// `height·(1 − |x − center|²/radius²)²` inside its disc, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub center: Point2,
    pub radius: f64,
    pub height: f64,
}

impl Bump {
    pub fn value(&self, x: Point2) -> f64 {
        let s = (x - self.center).norm_sq() / (self.radius * self.radius);
        if s < 1.0 {
            self.height * (1.0 - s) * (1.0 - s)
        } else {
            0.0
        }
    }
}

pub fn bump_field(n: usize, bumps: &[Bump]) -> Result<GridField> {
    GridField::from_fn(n, |x| bumps.iter().map(|b| b.value(x)).sum())
}

/// Between one and three bumps whose supports stay inside the disc of radius 0.95.
pub fn random_bumps<R: Rng>(rng: &mut R) -> Vec<Bump> {
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let (r, phi) = (rng.gen_range(0.0..0.6), rng.gen_range(0.0..2.0 * PI));
            Bump {
                center: Point2::new(r * phi.cos(), r * phi.sin()),
                radius: rng.gen_range(0.15..0.35),
                height: rng.gen_range(0.2..1.0),
            }
        })
        .collect()
}

/// Up to six intervals in `[-5, 5]`, merged where they overlap.
pub fn random_interval_union<R: Rng>(rng: &mut R) -> IntervalUnion {
    let k = rng.gen_range(0..=6);
    let pieces = (0..k)
        .map(|_| {
            let a = rng.gen_range(-5.0..5.0);
            (a, a + rng.gen_range(0.05..1.5))
        })
        .collect();
    IntervalUnion::normalized(pieces).expect("generated intervals are finite and non-empty")
}

/// Counts per property over a suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertySummary {
    pub property: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest `value - bound` seen; negative when every case passed with room.
    pub worst_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub interval_cases: usize,
    pub field_cases: usize,
    pub grid_n: usize,
    pub summary: Vec<PropertySummary>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.iter().all(|s| s.failures == 0)
    }

    fn record(&mut self, checks: &[PropertyCheck]) {
        for c in checks {
            let entry = match self.summary.iter_mut().find(|s| s.property == c.property) {
                Some(e) => e,
                None => {
                    self.summary.push(PropertySummary { property: c.property, cases: 0, failures: 0, worst_margin: f64::NEG_INFINITY });
                    self.summary.last_mut().expect("just pushed")
                }
            };
            entry.cases += 1;
            entry.failures += usize::from(!c.passed);
            entry.worst_margin = entry.worst_margin.max(c.value - c.bound);
        }
    }
}

/// Runs every property on seeded random inputs.
pub fn run_property_suite(seed: u64, interval_cases: usize, field_cases: usize, grid_n: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport { seed, interval_cases, field_cases, grid_n, summary: Vec::new() };
    for _ in 0..interval_cases {
        let m = random_interval_union(&mut rng);
        let extra = random_interval_union(&mut rng);
        let (s, t) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        report.record(&interval_properties(&m, &extra, s, t)?);
    }
    for _ in 0..field_cases {
        let u = bump_field(grid_n, &random_bumps(&mut rng))?;
        let w = bump_field(grid_n, &random_bumps(&mut rng))?;
        let t = rng.gen_range(0.05..1.0);
        report.record(&field_properties(&u, &w, t)?);
    }
    Ok(report)
}
