use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::config::{parse_list, RunConfig};
use super::{Command, EXIT_INCONSISTENT, EXIT_NUMERICAL, EXIT_OK, EXIT_WINDOW};
use crate::csts::{csts_field_rotated, dirichlet_energy, properties::run_property_suite};
use crate::disc_potential::{relative_stream, stream_multiscale};
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::patch::{parse_patch, MultiScalePatch};
use crate::rigidity::{
    build_relative_stream, verify_patch_rigidity, verify_smooth_rigidity, Regime, RotatingPatchProblem, RotatingSmoothProblem, Verdict,
    VerdictRecord,
};
use crate::symmetry::{check_all_directions, decompose, radial_verdict};
use crate::vstate::{bifurcation_scan_report, continue_branch, gnuplot_script, seed_branch, write_branch_csv, FourierBoundary};

pub(super) fn dispatch(command: &Command, config: &RunConfig) -> Result<i32> {
    match command {
        Command::Stream { patch, omega } => stream(patch, *omega, config),
        Command::Verify { input, omega } => verify(input, *omega, config),
        Command::Csts { field, t, direction } => csts(field, t, *direction, config),
        Command::Symmetry { input, omega } => symmetry(input, *omega, config),
        Command::Vstate { b, m, omega_range, steps, modes, amplitude, step, count } => {
            vstate(*b, *m, omega_range, *steps, *modes, *amplitude, *step, *count, config)
        }
        Command::Props { interval_cases, field_cases } => props(*interval_cases, *field_cases, config),
    }
}

enum Input {
    Patch(MultiScalePatch),
    Field(GridField),
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_patch(path: &Path) -> Result<MultiScalePatch> {
    parse_patch(&read_text(path)?)
}

fn read_field(path: &Path) -> Result<GridField> {
    let file = File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    GridField::read_csv(BufReader::new(file)).map_err(|e| match e {
        Error::Io(io) => Error::Parse(format!("{}: {io}", path.display())),
        other => other,
    })
}

/// Patches are JSON objects, fields are CSV; the extension decides, then the first character.
fn read_input(path: &Path) -> Result<Input> {
    let is_patch = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => true,
        Some("csv") => false,
        _ => read_text(path)?.trim_start().starts_with('{'),
    };
    Ok(if is_patch { Input::Patch(read_patch(path)?) } else { Input::Field(read_field(path)?) })
}

fn write_field(path: &Path, u: &GridField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    u.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn stream(patch: &Path, omega: f64, config: &RunConfig) -> Result<i32> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("angular velocity {omega} is not finite")));
    }
    let patch = read_patch(patch)?;
    let u = stream_multiscale(&patch, &GridField::zeros(config.grid_n)?)?;
    let relative = relative_stream(&u, omega);
    let (plain, rel) = (config.out.join("stream.csv"), config.out.join("relative_stream.csv"));
    write_field(&plain, &u)?;
    write_field(&rel, &relative)?;
    let c = (config.grid_n - 1) / 2;
    print_json(&json!({
        "omega": omega,
        "grid_n": config.grid_n,
        "center_stream": u.get(c, c),
        "center_relative_stream": relative.get(c, c),
        "files": [file_name(&plain), file_name(&rel)],
    }));
    Ok(EXIT_OK)
}

fn verdict_code(record: &VerdictRecord) -> i32 {
    match record.verdict {
        Verdict::ConsistentRadial => EXIT_OK,
        Verdict::Inconsistent => EXIT_INCONSISTENT,
        Verdict::WindowRegimeUntested => EXIT_WINDOW,
        Verdict::Inconclusive => EXIT_NUMERICAL,
    }
}

fn verify(input: &Path, omega: f64, config: &RunConfig) -> Result<i32> {
    let mut vc = config.verify_config();
    let record = match read_input(input)? {
        Input::Patch(p) => verify_patch_rigidity(&RotatingPatchProblem::multiscale(p, omega)?, &vc)?,
        Input::Field(omega0) => {
            vc.n = omega0.n();
            verify_smooth_rigidity(&RotatingSmoothProblem::new(omega0, omega)?, &vc)?
        }
    };
    write_text(&config.out.join("verdict.json"), &record.to_json())?;
    for (k, (_, report)) in record.reports.iter().enumerate() {
        let mut w = BufWriter::new(File::create(config.out.join(format!("energy_dir{k:02}.csv")))?);
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    println!("{}", record.to_json());
    Ok(verdict_code(&record))
}

fn csts(field: &Path, t: &str, direction: f64, config: &RunConfig) -> Result<i32> {
    let times = parse_list(t)?;
    if times.is_empty() {
        return Err(Error::Parse("the t-list is empty".into()));
    }
    if !direction.is_finite() {
        return Err(Error::Domain(format!("direction {direction} is not finite")));
    }
    let u = read_field(field)?;
    let mut energy = String::from("t,energy\n");
    let mut files = Vec::new();
    for (k, &tk) in times.iter().enumerate() {
        let ut = csts_field_rotated(&u, direction, tk)?;
        let path = config.out.join(format!("csts_{k:02}.csv"));
        write_field(&path, &ut)?;
        files.push(file_name(&path));
        energy.push_str(&format!("{tk:e},{:e}\n", dirichlet_energy(&ut)));
    }
    write_text(&config.out.join("energy.csv"), &energy)?;
    print_json(&json!({
        "direction": direction,
        "t": times.iter().map(|&t| if t.is_finite() { json!(t) } else { json!(t.to_string()) }).collect::<Vec<_>>(),
        "initial_energy": dirichlet_energy(&u),
        "files": files,
        "energy": "energy.csv",
    }));
    Ok(EXIT_OK)
}

fn symmetry(input: &Path, omega: f64, config: &RunConfig) -> Result<i32> {
    let (u, rhs, regime) = match read_input(input)? {
        Input::Patch(p) => {
            let problem = RotatingPatchProblem::multiscale(p, omega)?;
            if problem.regime() == Regime::Window {
                print_json(&json!({ "omega": omega, "regime": problem.regime() }));
                return Ok(EXIT_WINDOW);
            }
            let w = build_relative_stream(&problem, config.grid_n)?;
            (w.field, Some(w.rhs), Some(w.regime))
        }
        Input::Field(u) => (u, None, None),
    };
    let reports = check_all_directions(&u, config.dirs, config.symmetry_tol)?;
    let symmetric = reports.iter().all(|r| r.passed);
    let decomposition = match decompose(&u, config.tol.max(2.0 * u.h())) {
        Ok(d) => serde_json::to_value(d).expect("decompositions serialize"),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let radial = match &rhs {
        Some(r) => match radial_verdict(&u, r, config.tol) {
            Ok(ok) => json!(ok),
            Err(e) => json!({ "error": e.to_string() }),
        },
        None => Value::Null,
    };
    let out = json!({
        "omega": omega,
        "regime": regime,
        "all_directions_symmetric": symmetric,
        "directions": reports,
        "decomposition": decomposition,
        "radial": radial,
    });
    let text = serde_json::to_string_pretty(&out).expect("JSON values serialize");
    write_text(&config.out.join("symmetry.json"), &text)?;
    println!("{text}");
    Ok(if symmetric { EXIT_OK } else { EXIT_INCONSISTENT })
}

#[allow(clippy::too_many_arguments)]
fn vstate(b: f64, m: usize, range: &str, steps: usize, modes: usize, amplitude: f64, step: f64, count: usize, config: &RunConfig) -> Result<i32> {
    let range = match parse_list(range)?.as_slice() {
        &[lo, hi] => (lo, hi),
        _ => return Err(Error::Parse(format!("omega range {range:?} is not lo,hi"))),
    };
    FourierBoundary::circle(b, m, modes)?;
    let report = bifurcation_scan_report(b, m, modes, range, steps)?;

    let mut scan = String::from("omega,sigma_min,det_sign\n");
    for s in &report.samples {
        scan.push_str(&format!("{:e},{:e},{}\n", s.omega, s.sigma_min, s.det_sign));
    }
    write_text(&config.out.join("scan.csv"), &scan)?;
    let stars: String = report.candidates.iter().map(|w| format!("{w:e}\n")).collect();
    write_text(&config.out.join("bifurcations.csv"), &stars)?;

    let mut files = Vec::new();
    let mut branches = Vec::new();
    for (k, &omega_star) in report.candidates.iter().enumerate() {
        let seed = seed_branch(b, m, modes, omega_star, amplitude)?;
        let branch = continue_branch(&seed, step, count)?;
        let name = format!("branch_{}.csv", k + 1);
        let mut w = BufWriter::new(File::create(config.out.join(&name))?);
        write_branch_csv(&branch.points, &mut w)?;
        w.flush()?;
        let omegas = branch.points.iter().map(|p| p.omega);
        branches.push(json!({
            "file": name,
            "omega_star": omega_star,
            "points": branch.points.len(),
            "omega_min": omegas.clone().fold(f64::INFINITY, f64::min),
            "omega_max": omegas.fold(f64::NEG_INFINITY, f64::max),
            "stopped": branch.stopped,
        }));
        files.push(name);
    }
    write_text(&config.out.join("branches.gp"), &gnuplot_script(&files))?;
    print_json(&json!({
        "b": b,
        "m": m,
        "modes": modes,
        "range": [range.0, range.1],
        "crossings": report.crossings,
        "candidates": report.candidates,
        "branches": branches,
    }));
    Ok(EXIT_OK)
}

fn props(interval_cases: usize, field_cases: usize, config: &RunConfig) -> Result<i32> {
    let report = run_property_suite(config.seed, interval_cases, field_cases, config.grid_n)?;
    let text = serde_json::to_string_pretty(&report).expect("suite reports serialize");
    write_text(&config.out.join("props.json"), &text)?;
    println!("{text}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_INCONSISTENT })
}
