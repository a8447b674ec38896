use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rigidity::{dyadic_t_grid, VerifyConfig};

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid_n: usize,
    pub t_grid: Vec<f64>,
    pub dirs: usize,
    /// Radial and residual tolerance.
    pub tol: f64,
    pub symmetry_tol: f64,
    pub samples_per_edge: usize,
    pub step_k: usize,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        RunConfig {
            grid_n: v.n,
            t_grid: v.t_grid,
            dirs: v.n_dirs,
            tol: v.residual_tol,
            symmetry_tol: v.symmetry_tol,
            samples_per_edge: v.samples_per_edge,
            step_k: v.step_k,
            out: PathBuf::from("."),
            seed: 0,
        }
    }
}

/// Reads `dyadic:A:B` as `2^-A, …, 2^-B`, or a comma-separated list of times.
pub fn parse_t_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("dyadic:") {
        let (a, b) = rest.split_once(':').ok_or_else(|| Error::Parse(format!("t-grid {spec:?} is not dyadic:A:B")))?;
        let parse = |s: &str| s.trim().parse::<i32>().map_err(|_| Error::Parse(format!("bad exponent {s:?} in t-grid")));
        return Ok(dyadic_t_grid(parse(a)?, parse(b)?));
    }
    parse_list(spec)
}

/// Comma-separated reals; an empty string gives an empty list.
pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}"))))
        .collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "grid_n" => self.grid_n = parse_value(key, value)?,
            "t_grid" => self.t_grid = parse_t_grid(value)?,
            "dirs" => self.dirs = parse_value(key, value)?,
            "tol" => self.tol = parse_value(key, value)?,
            "symmetry_tol" => self.symmetry_tol = parse_value(key, value)?,
            "samples_per_edge" => self.samples_per_edge = parse_value(key, value)?,
            "step_k" => self.step_k = parse_value(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse_value(key, value)?,
            _ => return Err(Error::Parse(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a file of `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("{}:{}: expected key = value", path.display(), k + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n % 2 == 0 {
            return Err(Error::Domain(format!("grid_n = {} must be odd so a node sits on the origin", self.grid_n)));
        }
        for (name, v) in [("tol", self.tol), ("symmetry_tol", self.symmetry_tol)] {
            if !(v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            n: self.grid_n,
            n_dirs: self.dirs,
            t_grid: self.t_grid.clone(),
            symmetry_tol: self.symmetry_tol,
            radial_tol: self.tol,
            residual_tol: self.tol,
            samples_per_edge: self.samples_per_edge,
            step_k: self.step_k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_grids() {
        assert_eq!(parse_t_grid("dyadic:3:5").unwrap(), vec![0.125, 0.0625, 0.03125]);
        assert_eq!(parse_t_grid(" 0.5, 0.25 ").unwrap(), vec![0.5, 0.25]);
        assert!(parse_t_grid("").unwrap().is_empty());
        assert!(parse_t_grid("dyadic:3").is_err());
        assert!(parse_t_grid("0.5,x").is_err());
    }

    #[test]
    fn file_settings_override_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# resolution\ngrid_n = 129\nseed=7  # for props\n\nt_grid = dyadic:2:4\n").unwrap();
        let mut c = RunConfig { grid_n: 65, ..RunConfig::default() };
        c.apply_file(&path).unwrap();
        assert_eq!((c.grid_n, c.seed, c.t_grid.len()), (129, 7, 3));

        std::fs::write(&path, "colour = blue\n").unwrap();
        assert!(matches!(c.apply_file(&path), Err(Error::Parse(_))));
        std::fs::write(&path, "grid_n 129\n").unwrap();
        assert!(matches!(c.apply_file(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn even_grids_and_bad_tolerances_are_refused() {
        assert!(RunConfig { grid_n: 128, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { tol: 0.0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
