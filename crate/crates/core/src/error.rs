use thiserror::Error;

use crate::geometry::Point2;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("coincident points {0:?}: the Green function is singular there")]
    Singular(Point2),

    #[error("numerical failure: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("level {level} is not a regular value: |grad| = {gradient:e} at ({x:.4}, {y:.4})", x = .point.x1, y = .point.x2)]
    Irregular { level: f64, gradient: f64, point: Point2 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("symmetric decomposition failed at level {level}: {reason}")]
    Decomposition { level: f64, reason: String },

    #[error("step approximation failed in band {band}: {reason}")]
    Approximation { band: usize, reason: String },

    #[error("jacobian is singular (condition ~{condition:e}); the solve is too close to a bifurcation")]
    BifurcationProximity { condition: f64 },

    #[error("newton iteration did not converge after {iterations} steps; residual trace {trace:?}")]
    NoConvergence { iterations: usize, trace: Vec<f64> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
