//! Comparison-geometry toolkit for metric spaces.
//!
//! The crate measures geometry synthetically, from distances alone: model
//! surfaces of constant curvature ([`model`]), comparison triangles and
//! comparison angles ([`comparison`]), concrete length spaces with
//! shortest-path oracles ([`spaces`]), numerical upper/lower angles between
//! geodesics ([`angles`]), and distance-to-set first-variation and
//! curvature-bound checks ([`variation`]). The [`scenario`] module runs
//! declarative JSON scenarios over all of it and writes machine-readable
//! reports; the `alexandrov` binary is a thin wrapper around it.

pub mod angles;
pub mod comparison;
pub mod error;
pub mod model;
pub mod scenario;
pub mod spaces;
pub mod variation;

pub use error::{GeometryError, Result};
pub use model::{diameter, exp_map, geodesic_point, model_distance, vertex_angle, Chart, Curvature, ModelPoint};
pub use comparison::{
    comparison_angle, comparison_point, embed_triangle, thin_triangle_residual, Admissibility,
    ComparisonTriangle, Side, TriangleSides,
};
pub use spaces::{MetricGraph, Point, SampledPath, SpaceHandle};
