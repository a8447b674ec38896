use std::path::{Path, PathBuf};
use std::process::Command;

use vortex_rigidity::csts::properties::{bump_field, Bump};
use vortex_rigidity::disc_potential::stream_radial;
use vortex_rigidity::patch::{write_patch, JordanPolygon, MultiScalePatch, PatchComponent, PatchSpec};
use vortex_rigidity::{GridField, Point2};

const BIN: &str = env!("CARGO_BIN_EXE_rigidity");

struct Run {
    code: i32,
    stdout: String,
}

fn rigidity(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run { code: out.status.code().expect("exit code"), stdout: String::from_utf8(out.stdout).unwrap() }
}

fn write_fixture(dir: &Path, name: &str, patch: PatchSpec) -> String {
    let path = dir.join(name);
    std::fs::write(&path, write_patch(&MultiScalePatch::from_patch(&patch))).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_field(dir: &Path, name: &str, u: &GridField) -> String {
    let path = dir.join(name);
    u.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn disc(dir: &Path) -> String {
    write_fixture(dir, "disc.json", PatchSpec::single(PatchComponent::disc(Point2::ORIGIN, 0.5, 2048).unwrap()).unwrap())
}

fn annulus(dir: &Path) -> String {
    write_fixture(dir, "annulus.json", PatchSpec::single(PatchComponent::annulus(Point2::ORIGIN, 0.3, 0.6, 2048).unwrap()).unwrap())
}

fn ellipse(dir: &Path) -> String {
    let e = JordanPolygon::ellipse(Point2::ORIGIN, 0.35, 0.25, 0.0, 2048).unwrap();
    write_fixture(dir, "ellipse.json", PatchSpec::single(PatchComponent::simple(e)).unwrap())
}

fn out_dir(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn read_field(path: PathBuf) -> GridField {
    GridField::read_csv(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap()
}

fn energies(path: PathBuf) -> Vec<f64> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

#[test]
fn stream_centre_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(dir.path(), "s");
    let run = rigidity(&["stream", &disc(dir.path()), "--grid-n", "129", "--out", &out]);
    assert_eq!(run.code, 0);
    let u = read_field(dir.path().join("s/stream.csv"));
    let exact = stream_radial(0.5, Point2::ORIGIN).unwrap();
    assert!((u.get(64, 64) - exact).abs() <= 5e-4, "{} vs {exact}", u.get(64, 64));
    // Without --omega the frame is at rest and the relative stream is the plain one.
    assert_eq!(std::fs::read(dir.path().join("s/stream.csv")).unwrap(), std::fs::read(dir.path().join("s/relative_stream.csv")).unwrap());
}

#[test]
fn stream_shifts_by_the_rotation_term() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(dir.path(), "s");
    assert_eq!(rigidity(&["stream", &disc(dir.path()), "--omega", "-1", "--grid-n", "65", "--out", &out]).code, 0);
    let u = read_field(dir.path().join("s/stream.csv"));
    let rel = read_field(dir.path().join("s/relative_stream.csv"));
    assert!((rel.get(32, 32) - (u.get(32, 32) + 0.5)).abs() < 1e-15);
}

#[test]
fn malformed_inputs_exit_with_the_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format\": \"vortex-patch\", \"version\": 1, \"components\": [{\"outer\": [[0.1, 0.1]]}]}").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    let out = out_dir(dir.path(), "o");
    assert_eq!(rigidity(&["stream", &bad, "--out", &out]).code, 2);
    assert_eq!(rigidity(&["stream", "no/such/file.json", "--out", &out]).code, 2);
    assert_eq!(rigidity(&["verify", &bad, "--out", &out]).code, 2);
    assert_eq!(rigidity(&["stream", &disc(dir.path()), "--grid-n", "64", "--out", &out]).code, 2);
    assert_eq!(rigidity(&["frobnicate"]).code, 2);
    assert_eq!(rigidity(&["--help"]).code, 0);
}

#[test]
fn verify_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(dir.path(), "v");
    let common = ["--grid-n", "129", "--dirs", "8", "--out", &out];
    let verify = |input: &str, omega: &str| {
        let mut args = vec!["verify", input, "--omega", omega];
        args.extend_from_slice(&common);
        rigidity(&args)
    };
    let radial = verify(&annulus(dir.path()), "-1");
    assert_eq!(radial.code, 0, "{}", radial.stdout);
    let record: serde_json::Value = serde_json::from_str(&radial.stdout).unwrap();
    assert_eq!(record["verdict"], "consistent-radial");
    assert!(dir.path().join("v/verdict.json").exists());
    assert!(dir.path().join("v/energy_dir00.csv").exists());

    let ellipse = verify(&ellipse(dir.path()), "0");
    assert_eq!(ellipse.code, 4, "{}", ellipse.stdout);
    assert_eq!(verify(&disc(dir.path()), "0.3").code, 5);
}

#[test]
fn verify_accepts_smooth_vorticities() {
    let dir = tempfile::tempdir().unwrap();
    let omega0 = bump_field(129, &[Bump { center: Point2::ORIGIN, radius: 0.6, height: 1.0 }]).unwrap();
    let field = write_field(dir.path(), "omega0.csv", &omega0);
    let out = out_dir(dir.path(), "v");
    // Above half the sup of the vorticity the relative stream is subharmonic.
    let run = rigidity(&["verify", &field, "--omega", "0.6", "--dirs", "8", "--out", &out]);
    assert_eq!(run.code, 0, "{}", run.stdout);
}

#[test]
fn csts_energies() {
    let dir = tempfile::tempdir().unwrap();
    let radial = write_field(dir.path(), "radial.csv", &bump_field(65, &[Bump { center: Point2::ORIGIN, radius: 0.5, height: 1.0 }]).unwrap());
    // Rows of a sheared bump are centred at x₂, so the flow straightens the
    // shear and the energy E₀ + e^{-2t}·∫(∂₁u)² strictly decreases.
    let bump = Bump { center: Point2::ORIGIN, radius: 0.35, height: 1.0 };
    let sheared = GridField::from_fn(65, |x| bump.value(Point2::new(x.x1 - x.x2, x.x2))).unwrap();
    let shifted = write_field(dir.path(), "sheared.csv", &sheared);
    let (a, b) = (out_dir(dir.path(), "a"), out_dir(dir.path(), "b"));
    assert_eq!(rigidity(&["csts", &radial, "--t", "0.1,0.4,1.6,inf", "--out", &a]).code, 0);
    let e = energies(dir.path().join("a/energy.csv"));
    assert_eq!(e.len(), 4);
    assert!(e.iter().all(|x| (x - e[0]).abs() <= 1e-12 * e[0]), "{e:?}");

    assert_eq!(rigidity(&["csts", &shifted, "--t", "0.05,0.1,0.2,0.4,0.8,inf", "--out", &b]).code, 0);
    let e = energies(dir.path().join("b/energy.csv"));
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    assert!(dir.path().join("b/csts_05.csv").exists());

    assert_eq!(rigidity(&["csts", &radial, "--out", &a]).code, 2);
    assert_eq!(rigidity(&["csts", &radial, "--t", "", "--out", &a]).code, 2);
    let negative = write_field(dir.path(), "neg.csv", &GridField::from_fn(65, |x| x.x1).unwrap());
    assert_eq!(rigidity(&["csts", &negative, "--t", "0.1", "--out", &a]).code, 2);
}

#[test]
fn symmetry_separates_centred_and_offset_patches() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(dir.path(), "y");
    let centred = rigidity(&["symmetry", &annulus(dir.path()), "--omega", "-1", "--grid-n", "129", "--dirs", "8", "--out", &out]);
    assert_eq!(centred.code, 0, "{}", centred.stdout);
    let report: serde_json::Value = serde_json::from_str(&centred.stdout).unwrap();
    assert_eq!(report["radial"], true);

    let offset = write_fixture(dir.path(), "offset.json", PatchSpec::single(PatchComponent::disc(Point2::new(0.2, 0.1), 0.3, 2048).unwrap()).unwrap());
    assert_eq!(rigidity(&["symmetry", &offset, "--omega", "-0.5", "--grid-n", "129", "--dirs", "8", "--out", &out]).code, 4);
    assert_eq!(rigidity(&["symmetry", &offset, "--omega", "0.25", "--out", &out]).code, 5);
}

#[test]
fn vstate_writes_one_branch_inside_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_dir(dir.path(), "w");
    assert_eq!(rigidity(&["vstate", "--b", "0.5", "--m", "3", "--modes", "4", "--out", &out]).code, 0);
    let files: Vec<String> = std::fs::read_dir(dir.path().join("w")).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert_eq!(files.iter().filter(|f| f.starts_with("branch_")).count(), 1, "{files:?}");
    let branch = std::fs::read_to_string(dir.path().join("w/branch_1.csv")).unwrap();
    let omegas: Vec<f64> = branch.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(omegas.len() >= 10);
    assert!(omegas.iter().all(|&w| w > 0.0 && w < 0.5));
    assert!(std::fs::read_to_string(dir.path().join("w/branches.gp")).unwrap().contains("branch_1.csv"));

    let empty = out_dir(dir.path(), "e");
    assert_eq!(rigidity(&["vstate", "--b", "0.5", "--m", "3", "--modes", "4", "--omega-range", "0.6,1.0", "--out", &empty]).code, 0);
    assert_eq!(std::fs::read(dir.path().join("e/bifurcations.csv")).unwrap().len(), 0);
    assert_eq!(rigidity(&["vstate", "--b", "1.0", "--m", "3", "--out", &empty]).code, 2);
    assert_eq!(rigidity(&["vstate", "--b", "0.5", "--m", "3", "--omega-range", "0.6", "--out", &empty]).code, 2);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\ngrid_n = 65\nseed = 9\n").unwrap();
    let out = out_dir(dir.path(), "p");
    let run = rigidity(&["props", "--interval-cases", "20", "--field-cases", "2", "--grid-n", "129", "--seed", "1", "--config", &cfg.to_string_lossy(), "--out", &out]);
    assert_eq!(run.code, 0);
    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!((report["grid_n"].as_u64(), report["seed"].as_u64()), (Some(65), Some(9)));

    std::fs::write(&cfg, "grid_n: 65\n").unwrap();
    assert_eq!(rigidity(&["props", "--config", &cfg.to_string_lossy(), "--out", &out]).code, 2);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let patch = disc(dir.path());
    let field = write_field(dir.path(), "f.csv", &bump_field(65, &[Bump { center: Point2::new(0.2, 0.0), radius: 0.4, height: 1.0 }]).unwrap());
    let commands: Vec<Vec<&str>> = vec![
        vec!["stream", &patch, "--omega", "0.2", "--grid-n", "65"],
        vec!["verify", &patch, "--omega", "-1", "--grid-n", "65", "--dirs", "8"],
        vec!["csts", &field, "--t", "0.1,0.3", "--direction", "0.7"],
        vec!["symmetry", &field, "--dirs", "8"],
        vec!["vstate", "--b", "0.5", "--m", "3", "--modes", "4", "--count", "3"],
        vec!["props", "--interval-cases", "20", "--field-cases", "2", "--grid-n", "65", "--seed", "4"],
    ];
    for (k, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = out_dir(dir.path(), &format!("run{k}_{rep}"));
            let mut full = args.clone();
            full.extend_from_slice(&["--out", &out]);
            let run = rigidity(&full);
            outputs.push((run.code, run.stdout, snapshot(Path::new(&out))));
        }
        assert!(!outputs[0].2.is_empty(), "{args:?} wrote nothing");
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}
