//! Numerical rigidity toolkit for rotating vortex patches in the unit disc.

pub mod cli;
pub mod csts;
pub mod disc_potential;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod patch;
pub mod rigidity;
pub mod symmetry;
pub mod vstate;

pub use error::{Error, Result};
pub use geometry::Point2;
pub use grid::{GridField, VectorField};
