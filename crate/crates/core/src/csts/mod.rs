//! Continuous Steiner symmetrization of interval unions and of grid fields.

mod field;
mod interval;
pub mod properties;

pub use field::{
    csts_field, csts_field_rotated, rotated_slices, csts_field_with_levels, dirichlet_energy, hardy_littlewood_check, steiner_field,
    SliceProfile, DEFAULT_LEVELS,
};
pub use interval::{flow_set, flow_set_traced, symmetrize_set, FlowTrace, IntervalUnion, MERGE_TOLERANCE};
