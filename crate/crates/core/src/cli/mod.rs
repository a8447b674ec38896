//! The `rigidity` command line: subcommands over the library with CSV and
//! JSON outputs and process exit codes.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_list, parse_t_grid, RunConfig};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;
pub const EXIT_WINDOW: i32 = 5;

/// Exit code for an error: bad input is a parse failure, everything else numerical.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Domain(_) | Error::Precondition(_) | Error::Geometry(_) => EXIT_PARSE,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "rigidity", version, about = "Rigidity checks for rotating vortex patches in the unit disc")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Odd grid size n (nodes per side of [-1, 1]²).
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Radial and boundary-residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Number of symmetrization directions kπ/dirs.
    #[arg(long, global = true)]
    pub dirs: Option<usize>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Times of the o(t) checks: `dyadic:A:B` or a comma-separated list.
    #[arg(long, global = true)]
    pub t_grid: Option<String>,
    /// File of `key = value` lines; its settings take precedence over flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stream function of a patch and its relative stream in the rotating frame.
    Stream {
        patch: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega: f64,
    },
    /// Rigidity pipeline for a patch (.json) or a smooth vorticity field (.csv).
    Verify {
        input: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega: f64,
    },
    /// Continuous Steiner symmetrization of a non-negative field at several times.
    Csts {
        field: PathBuf,
        /// Comma-separated flow times; `inf` gives the Steiner symmetrization.
        #[arg(long, default_value = "")]
        t: String,
        /// Angle of the symmetrization direction from the x₁-axis.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        direction: f64,
    },
    /// Local symmetry in every direction and the annular decomposition.
    Symmetry {
        input: PathBuf,
        /// Angular velocity, used when the input is a patch.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega: f64,
    },
    /// Bifurcation scan and branch continuation of m-fold rotating patches off the disc of radius b.
    Vstate {
        #[arg(long)]
        b: f64,
        #[arg(long)]
        m: usize,
        /// Scan interval `lo,hi`.
        #[arg(long, allow_hyphen_values = true, default_value = "-0.25,0.75")]
        omega_range: String,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = crate::vstate::DEFAULT_MODES)]
        modes: usize,
        /// Pinned a₁ of the first branch point.
        #[arg(long, default_value_t = 1e-2)]
        amplitude: f64,
        /// Increase of a₁ per continuation step.
        #[arg(long, default_value_t = 5e-3)]
        step: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Randomized property suite of the symmetrization flow.
    Props {
        #[arg(long, default_value_t = 200)]
        interval_cases: usize,
        #[arg(long, default_value_t = 20)]
        field_cases: usize,
    },
}

impl GlobalArgs {
    /// Defaults, then flags, then the configuration file.
    pub fn resolve(&self) -> crate::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(v) = self.grid_n {
            c.grid_n = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.dirs {
            c.dirs = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = &self.t_grid {
            c.t_grid = parse_t_grid(v)?;
        }
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let outcome = cli.global.resolve().and_then(|config| {
        std::fs::create_dir_all(&config.out)?;
        commands::dispatch(&cli.command, &config)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
