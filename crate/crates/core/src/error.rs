//! Error type shared by the geometry kernels.

use thiserror::Error;

use crate::model::Chart;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("curvature must be finite, got {0}")]
    InvalidCurvature(f64),

    #[error("point chart {found:?} does not match the {expected:?} chart of k = {k}")]
    ChartMismatch { expected: Chart, found: Chart, k: f64 },

    #[error("{coords:?} does not satisfy the {chart:?} chart constraint (residual {residual:.3e})")]
    InvalidChartPoint { chart: Chart, coords: [f64; 3], residual: f64 },

    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange { what: &'static str, value: f64, min: f64, max: f64 },

    #[error("points are antipodal for k = {k}; the shortest path is not unique")]
    AntipodalPoints { k: f64 },

    #[error("degenerate vertex: coincident points (separation {separation:.3e})")]
    DegenerateVertex { separation: f64 },

    #[error("side lengths ({a}, {b}, {c}) violate the triangle inequality")]
    SidesNotMetric { a: f64, b: f64, c: f64 },

    #[error("zero adjacent side in comparison triangle (a = {a}, b = {b})")]
    ZeroAdjacentSide { a: f64, b: f64 },

    #[error("perimeter {perimeter} is not realizable in curvature k = {k} (needs < {bound})")]
    SidesNotAdmissible { perimeter: f64, k: f64, bound: f64 },

    #[error("point {0} is not valid for this space")]
    PointOutsideSpace(String),

    #[error("graph vertices {from} and {to} are not connected")]
    Disconnected { from: usize, to: usize },

    #[error("path has zero length")]
    ZeroLengthPath,

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("path parameters must be strictly increasing (t[{index}] = {value})")]
    NonMonotoneParameters { index: usize, value: f64 },

    #[error("paths do not share an origin (separation {separation:.3e} exceeds tolerance {tolerance:.3e})")]
    OriginMismatch { separation: f64, tolerance: f64 },

    #[error("grid schedule invalid: {0}")]
    InvalidSchedule(String),

    #[error("interpolation between samples is not defined on a graph-discretized space")]
    InterpolationUnsupported,

    #[error("compact set must be nonempty")]
    EmptySet,

    #[error("the path origin lies inside the target set (distance {distance:.3e})")]
    OriginInsideSet { distance: f64 },

    #[error("metric graph is malformed: {0}")]
    MalformedGraph(String),

    #[error("graph text format: {0}")]
    GraphFormat(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
