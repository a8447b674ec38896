//! Vortex patches: polygonal Jordan curves, components with holes, and their rasterisation.

mod contour;
mod polygon;
mod raster;
mod residual;
mod spec;

pub use contour::{band_components, level_curves, min_gradient_on, LevelCurve};
pub use polygon::{segment_distance, segments_intersect, signed_area, JordanPolygon, MIN_VERTICES};
pub use raster::{area_weighted_density, area_weighted_indicator, coverage, indicator, weighted_indicator};
pub use spec::{parse_patch, write_patch, MultiScalePatch, PatchComponent, PatchSpec};
pub use residual::{
    classify, classify_with_tolerance, radiality_measure, regularity_threshold, rotating_residual, smooth_residual,
    BoundarySamples, CurveResidual, PatchClass, ResidualReport, RADIAL_TOLERANCE, REGULARITY_FACTOR,
};
