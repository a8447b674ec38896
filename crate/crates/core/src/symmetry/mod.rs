//! Local symmetry, annular decomposition and the superharmonic radiality test.

mod decompose;
mod local;
mod radial;

pub use decompose::{decompose, fit_circle, AnnularDecomposition, AnnulusComponent, LADDER_LEVELS};
pub use local::{check_all_directions, check_direction, SymmetryReport, MISMATCH_FACTOR};
pub use radial::{radial_verdict, weak_superharmonic_defect};
