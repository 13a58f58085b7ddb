//! Declarative scenario runner.
//!
//! A scenario is a JSON document naming a space, paths, point sets, and a
//! list of checks. Checks with expectations report pass/fail; checks
//! without are diagnostic. Reports serialize to JSON and convergence-bearing
//! checks additionally emit CSV tables whose bytes are stable across runs
//! for a fixed config and seed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::angles::{
    angle_at, angle_triangle_inequality_check, diagonal_limit_check, estimate_angles,
    k_independence_check, monotonicity_check, supplementary_angles_check, BoundDirection,
    GridSchedule,
};
use crate::comparison::{comparison_angle, embed_triangle, thin_triangle_residual, TriangleSides};
use crate::error::GeometryError;
use crate::model::{exp_map, vertex_angle, Chart, Curvature, ModelPoint};
use crate::spaces::{MetricGraph, Point, SampledPath, SpaceHandle};
use crate::variation::{
    branching_triangle, check_triangle_curvature, curvature_bound_test, distance_to_set,
    first_variation_check, geometric_schedule, min_angle_to_set, rectangle_circuit_triangle,
    CompactSet, Region,
};

/// Errors surfaced by the scenario layer, tagged with the exit code the CLI
/// maps them to.
#[derive(Debug)]
pub enum ScenarioError {
    /// Config could not be parsed or references are invalid (exit 2).
    Config(String),
    /// A check failed to execute (exit 2).
    Execution(String),
    /// Output files could not be written (exit 2).
    Io(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Config(m) => write!(f, "config error: {m}"),
            ScenarioError::Execution(m) => write!(f, "execution error: {m}"),
            ScenarioError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<GeometryError> for ScenarioError {
    fn from(e: GeometryError) -> Self {
        ScenarioError::Execution(e.to_string())
    }
}

type SResult<T> = std::result::Result<T, ScenarioError>;

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub space: SpaceSpec,
    #[serde(default)]
    pub paths: BTreeMap<String, PathSpec>,
    #[serde(default)]
    pub sets: BTreeMap<String, SetSpec>,
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Model { k: f64 },
    Taxicab,
    CubeSurface { edge: f64, level: u32 },
    /// A metric graph loaded from the line-oriented text format.
    Graph { file: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    /// Chart or ambient coordinates (2 or 3 numbers depending on the space).
    Coords(Vec<f64>),
    /// Geodesic shot from the chart origin (model spaces only).
    Exp { azimuth: f64, radius: f64 },
    /// A graph vertex id.
    Vertex { vertex: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// Geodesic from the chart origin at the given azimuth (model spaces);
    /// on the taxicab plane, the straight Euclidean segment in that
    /// direction.
    Ray { azimuth: f64, length: f64, #[serde(default)] resolution: Option<f64> },
    /// Geodesic segment between two points (the canonical shortest path).
    Segment { from: PointSpec, to: PointSpec, #[serde(default)] resolution: Option<f64> },
    /// The diagonal `t -> (t, t)` on the taxicab plane, parameter in
    /// `[0, extent]`. Not unit-speed; its length is `2 * extent`.
    TaxicabDiag { extent: f64, #[serde(default)] resolution: Option<f64> },
    /// The axis path `s -> (s, 0)` on the taxicab plane.
    TaxicabAxis { extent: f64, #[serde(default)] resolution: Option<f64> },
    /// Explicit `(t, point)` samples.
    Samples { samples: Vec<(f64, PointSpec)> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub net_spacing: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub eps0: Option<f64>,
    #[serde(default)]
    pub factor: Option<f64>,
    #[serde(default)]
    pub levels: Option<u32>,
    #[serde(default)]
    pub samples_per_level: Option<u32>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSpec {
    Above,
    Below,
}

impl From<DirectionSpec> for BoundDirection {
    fn from(d: DirectionSpec) -> Self {
        match d {
            DirectionSpec::Above => BoundDirection::Above,
            DirectionSpec::Below => BoundDirection::Below,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    EstimateAngles {
        gamma: String,
        eta: String,
        k: f64,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default)]
        expect_upper: Option<[f64; 2]>,
        #[serde(default)]
        expect_lower: Option<[f64; 2]>,
    },
    Monotonicity {
        gamma: String,
        eta: String,
        k: f64,
        direction: DirectionSpec,
        #[serde(default)]
        s0: Option<f64>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    AngleTriangleInequality {
        gamma: String,
        eta: String,
        sigma: String,
        k: f64,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    SupplementaryAngles {
        gamma: String,
        t_mid: f64,
        sigma: String,
        k: f64,
        #[serde(default)]
        grid: Option<GridSpec>,
        /// Pass if the sum is within this tolerance of pi.
        #[serde(default)]
        expect_near_pi: Option<f64>,
        /// Pass if the sum deviates from pi by at least this much
        /// (counterexample scenarios).
        #[serde(default)]
        expect_deviation_at_least: Option<f64>,
    },
    KIndependence {
        gamma: String,
        eta: String,
        k_list: Vec<f64>,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default = "default_k_independence_tol")]
        tolerance: f64,
    },
    DiagonalLimit {
        function: DiagonalFunction,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default = "default_gap_tol")]
        gap_tolerance: f64,
        #[serde(default)]
        expect_converged: Option<bool>,
    },
    PathLength {
        path: String,
        #[serde(default)]
        expect: Option<[f64; 2]>,
    },
    DistanceToSet {
        point: PointSpec,
        set: String,
        #[serde(default)]
        expect_distance: Option<[f64; 2]>,
        #[serde(default)]
        expect_foot: Option<usize>,
    },
    MinAngleToSet {
        gamma: String,
        set: String,
        k: f64,
        #[serde(default)]
        slack: Option<f64>,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default)]
        expect_angle: Option<[f64; 2]>,
    },
    FirstVariation {
        gamma: String,
        set: String,
        k: f64,
        #[serde(default)]
        schedule: Option<ScheduleSpec>,
        #[serde(default)]
        grid: Option<GridSpec>,
        #[serde(default)]
        expect_limit: Option<f64>,
        #[serde(default)]
        limit_tolerance: Option<f64>,
        #[serde(default)]
        expect_residual_le: Option<f64>,
    },
    CurvatureBound {
        k: f64,
        direction: DirectionSpec,
        source: TriangleSource,
        expect: ViolationExpectation,
    },
    ThinTriangle {
        k: f64,
        alpha: f64,
        s: f64,
        #[serde(default = "default_thin_t0")]
        t0: f64,
        #[serde(default = "default_halvings")]
        halvings: u32,
        #[serde(default = "default_thin_residual")]
        expect_first_residual_le: f64,
    },
    CubeRefinement {
        edge: f64,
        min_level: u32,
        max_level: u32,
        from: [f64; 3],
        to: [f64; 3],
        #[serde(default = "default_cauchy_from")]
        cauchy_from: u32,
        #[serde(default)]
        expect_final: Option<[f64; 2]>,
    },
    ComparisonRoundtrip {
        trials: u32,
        k_list: Vec<f64>,
        #[serde(default = "default_roundtrip_tol")]
        tolerance: f64,
    },
}

fn default_k_independence_tol() -> f64 {
    1e-4
}

fn default_gap_tol() -> f64 {
    1e-3
}

fn default_thin_t0() -> f64 {
    1e-3
}

fn default_halvings() -> u32 {
    8
}

fn default_thin_residual() -> f64 {
    1e-2
}

fn default_cauchy_from() -> u32 {
    3
}

fn default_roundtrip_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub t0: f64,
    pub factor: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagonalFunction {
    /// `f(x, y) = x + y`: component-wise monotone, gap vanishes.
    Sum,
    /// `f(x, y) = min/max`: not monotone, gap persists by design.
    MinMaxRatio,
    /// Comparison-angle grid of a path pair.
    AngleGrid { gamma: String, eta: String, k: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TriangleSource {
    /// Random triangles in a metric ball.
    Region { center: PointSpec, radius: f64, trials: usize },
    /// The taxicab triangle whose sides trace a rectangle circuit.
    RectangleCircuit { scale: f64 },
    /// The taxicab triangle with branching geodesics.
    Branching { scale: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationExpectation {
    NoViolations,
    ViolationFound,
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Diagnostic,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub index: usize,
    pub op: String,
    pub status: CheckStatus,
    pub payload: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
    /// Wall-clock time; excluded from the CSV tables so their bytes stay
    /// reproducible.
    pub runtime_ms: f64,
    /// Rows of the convergence table this check emits, if any.
    #[serde(skip)]
    pub table: Option<Table>,
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File name suffix, e.g. "quotients".
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failed_count(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count()
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

struct Context {
    space: SpaceHandle,
    paths: BTreeMap<String, SampledPath>,
    sets: BTreeMap<String, CompactSet>,
    seed: u64,
}

fn build_space(spec: &SpaceSpec, base_dir: &Path) -> SResult<SpaceHandle> {
    match spec {
        SpaceSpec::Model { k } => {
            let k = Curvature::new(*k).map_err(|e| ScenarioError::Config(e.to_string()))?;
            Ok(SpaceHandle::model(k))
        }
        SpaceSpec::Taxicab => Ok(SpaceHandle::taxicab()),
        SpaceSpec::CubeSurface { edge, level } => {
            SpaceHandle::cube_surface(*edge, *level).map_err(|e| ScenarioError::Config(e.to_string()))
        }
        SpaceSpec::Graph { file } => {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
            let graph =
                MetricGraph::from_text(&text).map_err(|e| ScenarioError::Config(e.to_string()))?;
            Ok(SpaceHandle::from_graph(graph))
        }
    }
}

fn resolve_point(spec: &PointSpec, space: &SpaceHandle) -> SResult<Point> {
    let bad = |msg: String| ScenarioError::Config(msg);
    match (spec, space) {
        (PointSpec::Coords(c), SpaceHandle::Model(k)) => {
            let p = match (k.chart(), c.len()) {
                (Chart::Plane, 2) => ModelPoint::plane(c[0], c[1]),
                (Chart::Sphere, 3) => ModelPoint::sphere(c[0], c[1], c[2])
                    .map_err(|e| bad(e.to_string()))?,
                (Chart::Hyperboloid, 3) => ModelPoint::hyperboloid(c[0], c[1], c[2])
                    .map_err(|e| bad(e.to_string()))?,
                (chart, n) => {
                    return Err(bad(format!("{chart:?} chart expects 2 or 3 coords, got {n}")))
                }
            };
            Ok(Point::Model(p))
        }
        (PointSpec::Coords(c), SpaceHandle::Taxicab) => {
            if c.len() != 2 {
                return Err(bad(format!("taxicab points have 2 coords, got {}", c.len())));
            }
            Ok(Point::taxicab(c[0], c[1]))
        }
        (PointSpec::Coords(c), _) => {
            if c.len() != 3 {
                return Err(bad(format!("mesh points have 3 ambient coords, got {}", c.len())));
            }
            Ok(Point::Xyz([c[0], c[1], c[2]]))
        }
        (PointSpec::Exp { azimuth, radius }, SpaceHandle::Model(k)) => {
            let origin = ModelPoint::origin(k.chart());
            let p = exp_map(&origin, *azimuth, *radius, *k).map_err(|e| bad(e.to_string()))?;
            Ok(Point::Model(p))
        }
        (PointSpec::Exp { .. }, _) => {
            Err(bad("exp point specs are only defined on model spaces".into()))
        }
        (PointSpec::Vertex { vertex }, SpaceHandle::Graph(_) | SpaceHandle::CubeSurface { .. }) => {
            Ok(Point::Vertex(*vertex))
        }
        (PointSpec::Vertex { .. }, _) => {
            Err(bad("vertex point specs are only defined on graph spaces".into()))
        }
    }
}

fn build_path(name: &str, spec: &PathSpec, space: &SpaceHandle) -> SResult<SampledPath> {
    let err = |e: GeometryError| ScenarioError::Config(format!("path `{name}`: {e}"));
    match spec {
        PathSpec::Ray { azimuth, length, resolution } => {
            let res = resolution.unwrap_or(length / 64.0);
            match space {
                SpaceHandle::Model(k) => {
                    let origin = ModelPoint::origin(k.chart());
                    let tip = exp_map(&origin, *azimuth, *length, *k).map_err(err)?;
                    space
                        .shortest_path(&Point::Model(origin), &Point::Model(tip), res)
                        .map_err(err)
                }
                SpaceHandle::Taxicab => {
                    let n = ((length / res).ceil() as usize).max(1);
                    let pts: Vec<Point> = (0..=n)
                        .map(|i| {
                            let r = length * i as f64 / n as f64;
                            Point::taxicab(r * azimuth.cos(), r * azimuth.sin())
                        })
                        .collect();
                    SampledPath::from_points(space.clone(), pts).map_err(err)
                }
                _ => Err(ScenarioError::Config(format!(
                    "path `{name}`: rays are not defined on graph spaces"
                ))),
            }
        }
        PathSpec::Segment { from, to, resolution } => {
            let a = resolve_point(from, space)?;
            let b = resolve_point(to, space)?;
            let d = space.distance(&a, &b).map_err(err)?;
            let res = resolution.unwrap_or(d / 64.0);
            match space {
                SpaceHandle::Taxicab => {
                    // A straight Euclidean segment (not the canonical
                    // staircase), parameterized by taxicab arc length.
                    let (pa, pb) = match (a, b) {
                        (Point::Taxicab(pa), Point::Taxicab(pb)) => (pa, pb),
                        _ => unreachable!(),
                    };
                    let n = ((d / res).ceil() as usize).max(1);
                    let pts: Vec<Point> = (0..=n)
                        .map(|i| {
                            let f = i as f64 / n as f64;
                            Point::taxicab(pa[0] + f * (pb[0] - pa[0]), pa[1] + f * (pb[1] - pa[1]))
                        })
                        .collect();
                    SampledPath::from_points(space.clone(), pts).map_err(err)
                }
                _ => space.shortest_path(&a, &b, res).map_err(err),
            }
        }
        PathSpec::TaxicabDiag { extent, resolution } => {
            if !matches!(space, SpaceHandle::Taxicab) {
                return Err(ScenarioError::Config(format!(
                    "path `{name}`: taxicab_diag requires the taxicab space"
                )));
            }
            let res = resolution.unwrap_or(extent / 64.0);
            let n = ((extent / res).ceil() as usize).max(1);
            let samples: Vec<(f64, Point)> = (0..=n)
                .map(|i| {
                    let t = extent * i as f64 / n as f64;
                    (t, Point::taxicab(t, t))
                })
                .collect();
            SampledPath::new(space.clone(), samples).map_err(err)
        }
        PathSpec::TaxicabAxis { extent, resolution } => {
            if !matches!(space, SpaceHandle::Taxicab) {
                return Err(ScenarioError::Config(format!(
                    "path `{name}`: taxicab_axis requires the taxicab space"
                )));
            }
            let res = resolution.unwrap_or(extent / 64.0);
            let n = ((extent / res).ceil() as usize).max(1);
            let pts: Vec<Point> = (0..=n)
                .map(|i| Point::taxicab(extent * i as f64 / n as f64, 0.0))
                .collect();
            SampledPath::from_points(space.clone(), pts).map_err(err)
        }
        PathSpec::Samples { samples } => {
            let mut out = Vec::with_capacity(samples.len());
            for (t, p) in samples {
                out.push((*t, resolve_point(p, space)?));
            }
            SampledPath::new(space.clone(), out).map_err(err)
        }
    }
}

fn build_grid(
    spec: &Option<GridSpec>,
    gamma: &SampledPath,
    eta: &SampledPath,
) -> SResult<GridSchedule> {
    let default = GridSchedule::default_for(gamma, eta)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let spec = match spec {
        None => return Ok(default),
        Some(s) => s,
    };
    GridSchedule::new(
        spec.eps0.unwrap_or_else(|| default.eps0()),
        spec.factor.unwrap_or_else(|| default.factor()),
        spec.levels.unwrap_or_else(|| default.levels()),
        spec.samples_per_level.unwrap_or_else(|| default.samples_per_level()),
    )
    .map_err(|e| ScenarioError::Config(e.to_string()))
}

impl Context {
    fn path(&self, name: &str) -> SResult<&SampledPath> {
        self.paths
            .get(name)
            .ok_or_else(|| ScenarioError::Config(format!("unknown path `{name}`")))
    }

    fn set(&self, name: &str) -> SResult<&CompactSet> {
        self.sets
            .get(name)
            .ok_or_else(|| ScenarioError::Config(format!("unknown set `{name}`")))
    }
}

// ---------------------------------------------------------------------------
// Check execution
// ---------------------------------------------------------------------------

fn curvature(k: f64) -> SResult<Curvature> {
    Curvature::new(k).map_err(|e| ScenarioError::Config(e.to_string()))
}

fn within(value: f64, range: &[f64; 2]) -> bool {
    value >= range[0] && value <= range[1]
}

fn status_of(pass: Option<bool>) -> CheckStatus {
    match pass {
        Some(true) => CheckStatus::Pass,
        Some(false) => CheckStatus::Fail,
        None => CheckStatus::Diagnostic,
    }
}

fn op_name(spec: &CheckSpec) -> &'static str {
    match spec {
        CheckSpec::EstimateAngles { .. } => "estimate_angles",
        CheckSpec::Monotonicity { .. } => "monotonicity",
        CheckSpec::AngleTriangleInequality { .. } => "angle_triangle_inequality",
        CheckSpec::SupplementaryAngles { .. } => "supplementary_angles",
        CheckSpec::KIndependence { .. } => "k_independence",
        CheckSpec::DiagonalLimit { .. } => "diagonal_limit",
        CheckSpec::PathLength { .. } => "path_length",
        CheckSpec::DistanceToSet { .. } => "distance_to_set",
        CheckSpec::MinAngleToSet { .. } => "min_angle_to_set",
        CheckSpec::FirstVariation { .. } => "first_variation",
        CheckSpec::CurvatureBound { .. } => "curvature_bound",
        CheckSpec::ThinTriangle { .. } => "thin_triangle",
        CheckSpec::CubeRefinement { .. } => "cube_refinement",
        CheckSpec::ComparisonRoundtrip { .. } => "comparison_roundtrip",
    }
}

fn run_check(ctx: &Context, index: usize, spec: &CheckSpec) -> SResult<CheckResult> {
    let start = Instant::now();
    let (status, payload, error_bound, table) = dispatch_check(ctx, index, spec)?;
    Ok(CheckResult {
        index,
        op: op_name(spec).to_string(),
        status,
        payload,
        error_bound,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        table,
    })
}

#[allow(clippy::type_complexity)]
fn dispatch_check(
    ctx: &Context,
    index: usize,
    spec: &CheckSpec,
) -> SResult<(CheckStatus, serde_json::Value, Option<f64>, Option<Table>)> {
    let space = &ctx.space;
    match spec {
        CheckSpec::EstimateAngles { gamma, eta, k, grid, expect_upper, expect_lower } => {
            let g = ctx.path(gamma)?;
            let e = ctx.path(eta)?;
            let grid = build_grid(grid, g, e)?;
            let est = estimate_angles(space, g, e, curvature(*k)?, &grid)?;
            let mut pass = None;
            if let Some(r) = expect_upper {
                pass = Some(within(est.upper, r));
            }
            if let Some(r) = expect_lower {
                pass = Some(pass.unwrap_or(true) && within(est.lower, r));
            }
            let table = Table {
                name: "angle_levels",
                header: vec!["eps", "sup", "inf"],
                rows: est.per_level.iter().map(|l| vec![l.eps, l.sup, l.inf]).collect(),
            };
            let bound = est.error_bound;
            Ok((status_of(pass), serde_json::to_value(&est).unwrap(), Some(bound), Some(table)))
        }
        CheckSpec::Monotonicity { gamma, eta, k, direction, s0, grid } => {
            let g = ctx.path(gamma)?;
            let e = ctx.path(eta)?;
            let grid = build_grid(grid, g, e)?;
            let rep =
                monotonicity_check(space, g, e, curvature(*k)?, *s0, (*direction).into(), &grid)?;
            let table = Table {
                name: "monotonicity",
                header: vec!["t", "angle"],
                rows: rep.points.iter().map(|&(t, a)| vec![t, a]).collect(),
            };
            let pass = rep.pass;
            Ok((
                status_of(Some(pass)),
                serde_json::to_value(&rep).unwrap(),
                Some(rep.slack),
                Some(table),
            ))
        }
        CheckSpec::AngleTriangleInequality { gamma, eta, sigma, k, grid } => {
            let g = ctx.path(gamma)?;
            let e = ctx.path(eta)?;
            let s = ctx.path(sigma)?;
            let grid = build_grid(grid, g, e)?;
            let rep = angle_triangle_inequality_check(space, g, e, s, curvature(*k)?, &grid)?;
            Ok((
                status_of(Some(rep.pass)),
                serde_json::to_value(&rep).unwrap(),
                Some(rep.tolerance),
                None,
            ))
        }
        CheckSpec::SupplementaryAngles {
            gamma,
            t_mid,
            sigma,
            k,
            grid,
            expect_near_pi,
            expect_deviation_at_least,
        } => {
            let g = ctx.path(gamma)?;
            let s = ctx.path(sigma)?;
            let grid = build_grid(grid, g, s)?;
            let rep = supplementary_angles_check(space, g, *t_mid, s, curvature(*k)?, &grid)?;
            let mut pass = None;
            if let Some(tol) = expect_near_pi {
                pass = Some(rep.deviation_from_pi <= *tol);
            }
            if let Some(min_dev) = expect_deviation_at_least {
                pass = Some(pass.unwrap_or(true) && rep.deviation_from_pi >= *min_dev);
            }
            let bound = rep.error_bound;
            Ok((status_of(pass), serde_json::to_value(&rep).unwrap(), Some(bound), None))
        }
        CheckSpec::KIndependence { gamma, eta, k_list, grid, tolerance } => {
            let g = ctx.path(gamma)?;
            let e = ctx.path(eta)?;
            let grid = build_grid(grid, g, e)?;
            let rep = k_independence_check(space, g, e, &grid, k_list, *tolerance)?;
            let table = Table {
                name: "k_independence",
                header: vec!["k", "upper", "lower"],
                rows: rep.estimates.iter().map(|&(k, u, l)| vec![k, u, l]).collect(),
            };
            Ok((
                status_of(Some(rep.pass)),
                serde_json::to_value(&rep).unwrap(),
                Some(*tolerance),
                Some(table),
            ))
        }
        CheckSpec::DiagonalLimit { function, grid, gap_tolerance, expect_converged } => {
            let rep = match function {
                DiagonalFunction::Sum => {
                    let grid = match grid {
                        Some(_) => build_grid_free(grid)?,
                        None => GridSchedule::new(0.25, 0.5, 12, 32)
                            .map_err(|e| ScenarioError::Config(e.to_string()))?,
                    };
                    diagonal_limit_check(|x, y| x + y, &grid, *gap_tolerance)
                }
                DiagonalFunction::MinMaxRatio => {
                    let grid = match grid {
                        Some(_) => build_grid_free(grid)?,
                        None => GridSchedule::new(0.25, 0.5, 12, 32)
                            .map_err(|e| ScenarioError::Config(e.to_string()))?,
                    };
                    diagonal_limit_check(|x, y| x.min(y) / x.max(y), &grid, *gap_tolerance)
                }
                DiagonalFunction::AngleGrid { gamma, eta, k } => {
                    let g = ctx.path(gamma)?;
                    let e = ctx.path(eta)?;
                    let grid = build_grid(grid, g, e)?;
                    let k = curvature(*k)?;
                    let mut failure = None;
                    let rep = diagonal_limit_check(
                        |t, s| match angle_at(space, g, e, k, t, s) {
                            Ok(a) => a,
                            Err(err) => {
                                failure.get_or_insert(err.to_string());
                                f64::NAN
                            }
                        },
                        &grid,
                        *gap_tolerance,
                    );
                    if let Some(msg) = failure {
                        return Err(ScenarioError::Execution(msg));
                    }
                    rep
                }
            };
            let pass = expect_converged.map(|want| rep.converged == want);
            let table = Table {
                name: "diagonal_gaps",
                header: vec!["eps", "sup", "inf"],
                rows: rep.per_level.iter().map(|l| vec![l.eps, l.sup, l.inf]).collect(),
            };
            Ok((status_of(pass), serde_json::to_value(&rep).unwrap(), None, Some(table)))
        }
        CheckSpec::PathLength { path, expect } => {
            let p = ctx.path(path)?;
            let len = p.length();
            let pass = expect.as_ref().map(|r| within(len, r));
            Ok((status_of(pass), json!({ "length": len }), None, None))
        }
        CheckSpec::DistanceToSet { point, set, expect_distance, expect_foot } => {
            let p = resolve_point(point, space)?;
            let s = ctx.set(set)?;
            let (d, foot) = distance_to_set(space, &p, s)?;
            let mut pass = None;
            if let Some(r) = expect_distance {
                pass = Some(within(d, r));
            }
            if let Some(f) = expect_foot {
                pass = Some(pass.unwrap_or(true) && *f == foot);
            }
            Ok((status_of(pass), json!({ "distance": d, "foot": foot }), None, None))
        }
        CheckSpec::MinAngleToSet { gamma, set, k, slack, grid, expect_angle } => {
            let g = ctx.path(gamma)?;
            let s = ctx.set(set)?;
            let slack = slack.unwrap_or(2.0 * s.net_spacing() + 2.0 * space.certified_error() + 1e-9);
            let grid = match grid {
                Some(_) => Some(build_grid_free(grid)?),
                None => None,
            };
            let rep = min_angle_to_set(space, g, s, slack, curvature(*k)?, grid.as_ref())?;
            let pass = expect_angle.as_ref().map(|r| within(rep.angle, r));
            let bound = rep.angle_error;
            Ok((status_of(pass), serde_json::to_value(&rep).unwrap(), Some(bound), None))
        }
        CheckSpec::FirstVariation {
            gamma,
            set,
            k,
            schedule,
            grid,
            expect_limit,
            limit_tolerance,
            expect_residual_le,
        } => {
            let g = ctx.path(gamma)?;
            let s = ctx.set(set)?;
            let schedule: Vec<f64> = match schedule {
                Some(sp) => geometric_schedule(sp.t0, sp.factor, sp.count),
                None => Vec::new(),
            };
            let grid = match grid {
                Some(_) => Some(build_grid_free(grid)?),
                None => None,
            };
            let rep =
                first_variation_check(space, g, s, curvature(*k)?, &schedule, grid.as_ref())?;
            let mut pass = None;
            if let (Some(limit), Some(tol)) = (expect_limit, limit_tolerance) {
                pass = Some((rep.limit_estimate - limit).abs() <= *tol);
            }
            if let Some(rtol) = expect_residual_le {
                pass = Some(pass.unwrap_or(true) && rep.residual <= *rtol && rep.upper_bound_ok);
            }
            let mut rows = Vec::with_capacity(rep.quotients.len());
            for (i, &(t, q)) in rep.quotients.iter().enumerate() {
                rows.push(vec![t, q, rep.extrapolants[i]]);
            }
            let table = Table { name: "quotients", header: vec!["t", "quotient", "extrapolant"], rows };
            let bound = rep.combined_tolerance;
            Ok((status_of(pass), serde_json::to_value(&rep).unwrap(), Some(bound), Some(table)))
        }
        CheckSpec::CurvatureBound { k, direction, source, expect } => {
            let k = curvature(*k)?;
            let dir: BoundDirection = (*direction).into();
            let (payload, violations) = match source {
                TriangleSource::Region { center, radius, trials } => {
                    let center = resolve_point(center, space)?;
                    let region = Region { center, radius: *radius };
                    // Per-check seed keeps scenarios deterministic while
                    // decorrelating successive checks.
                    let rep = curvature_bound_test(
                        space,
                        &region,
                        k,
                        dir,
                        *trials,
                        ctx.seed.wrapping_add(index as u64),
                    )?;
                    let v = rep.violations_found;
                    (serde_json::to_value(&rep).unwrap(), v)
                }
                TriangleSource::RectangleCircuit { scale } => {
                    if !matches!(space, SpaceHandle::Taxicab) {
                        return Err(ScenarioError::Config(
                            "rectangle_circuit triangles live on the taxicab space".into(),
                        ));
                    }
                    let tri = rectangle_circuit_triangle(*scale)?;
                    let v = check_triangle_curvature(space, &tri, k, dir, 7)?;
                    (json!({ "violations_found": v.len(), "witnesses": v }), v.len())
                }
                TriangleSource::Branching { scale } => {
                    if !matches!(space, SpaceHandle::Taxicab) {
                        return Err(ScenarioError::Config(
                            "branching triangles live on the taxicab space".into(),
                        ));
                    }
                    let tri = branching_triangle(*scale)?;
                    let v = check_triangle_curvature(space, &tri, k, dir, 7)?;
                    (json!({ "violations_found": v.len(), "witnesses": v }), v.len())
                }
            };
            let pass = match expect {
                ViolationExpectation::NoViolations => violations == 0,
                ViolationExpectation::ViolationFound => violations > 0,
            };
            Ok((status_of(Some(pass)), payload, None, None))
        }
        CheckSpec::ThinTriangle { k, alpha, s, t0, halvings, expect_first_residual_le } => {
            let k = curvature(*k)?;
            let mut rows = Vec::new();
            let mut t = *t0;
            let mut prev = f64::INFINITY;
            let mut monotone = true;
            let mut first = None;
            for _ in 0..=*halvings {
                let r = thin_triangle_residual(k, *alpha, *s, t)?;
                first.get_or_insert(r);
                if r >= prev {
                    monotone = false;
                }
                rows.push(vec![t, r]);
                prev = r;
                t *= 0.5;
            }
            let first = first.unwrap();
            let pass = monotone && first <= *expect_first_residual_le;
            let table = Table { name: "thin_triangle", header: vec!["t", "residual"], rows };
            Ok((
                status_of(Some(pass)),
                json!({ "first_residual": first, "monotone": monotone, "halvings": halvings }),
                None,
                Some(table),
            ))
        }
        CheckSpec::CubeRefinement { edge, min_level, max_level, from, to, cauchy_from, expect_final } => {
            if min_level > max_level {
                return Err(ScenarioError::Config("min_level exceeds max_level".into()));
            }
            let mut rows = Vec::new();
            let mut dists = Vec::new();
            for level in *min_level..=*max_level {
                let space = SpaceHandle::cube_surface(*edge, level)?;
                let d = space.distance(&Point::Xyz(*from), &Point::Xyz(*to))?;
                let gap = dists.last().map(|&p: &f64| d - p).unwrap_or(0.0);
                rows.push(vec![level as f64, d, gap]);
                dists.push(d);
            }
            let monotone = dists.windows(2).all(|w| w[1] >= w[0] - 1e-12);
            let gaps: Vec<f64> = dists.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            let mut cauchy = true;
            for (i, w) in gaps.windows(2).enumerate() {
                let level = *min_level + i as u32;
                if level >= *cauchy_from && w[1] > w[0] / 2.0 + 1e-12 {
                    cauchy = false;
                }
            }
            let final_d = *dists.last().unwrap();
            let mut pass = monotone && cauchy;
            if let Some(r) = expect_final {
                pass = pass && within(final_d, r);
            }
            let table = Table { name: "cube_refinement", header: vec!["level", "distance", "gap"], rows };
            Ok((
                status_of(Some(pass)),
                json!({ "distances": dists, "monotone": monotone, "cauchy": cauchy, "final": final_d }),
                None,
                Some(table),
            ))
        }
        CheckSpec::ComparisonRoundtrip { trials, k_list, tolerance } => {
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            let mut rng =
                rand_chacha::ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(index as u64));
            let mut max_dev: f64 = 0.0;
            let mut max_realization: f64 = 0.0;
            for &kk in k_list {
                let k = curvature(kk)?;
                for _ in 0..*trials {
                    let a = rng.random_range(0.05..1.2);
                    let b = rng.random_range(0.05..1.2);
                    let lo: f64 = (a - b).abs();
                    let hi = (a + b).min(2.0 * k.diameter() - a - b - 1e-6);
                    let margin = 1e-3 * (hi - lo);
                    let c = rng.random_range(lo + margin..hi - margin);
                    let sides = TriangleSides::new(a, b, c)
                        .map_err(|e| ScenarioError::Execution(e.to_string()))?;
                    let theta = comparison_angle(&sides, k)?;
                    let tri = embed_triangle(&sides, k)?;
                    let [x, y, z] = tri.vertices();
                    let measured = vertex_angle(x, y, z, k)?;
                    max_dev = max_dev.max((theta - measured).abs());
                    let realized = crate::model::model_distance(y, z, k)?;
                    max_realization = max_realization.max((realized - c).abs());
                }
            }
            let pass = max_dev <= *tolerance && max_realization <= 1e-10;
            Ok((
                status_of(Some(pass)),
                json!({
                    "max_angle_deviation": max_dev,
                    "max_side_realization_error": max_realization,
                    "trials_per_k": trials,
                }),
                Some(*tolerance),
                None,
            ))
        }
    }
}

/// Grid spec without paths to default from: all fields must be present or
/// fall back to the standalone defaults.
fn build_grid_free(spec: &Option<GridSpec>) -> SResult<GridSchedule> {
    let s = spec.as_ref().expect("caller checked presence");
    GridSchedule::new(
        s.eps0.unwrap_or(0.25),
        s.factor.unwrap_or(0.5),
        s.levels.unwrap_or(12),
        s.samples_per_level.unwrap_or(32),
    )
    .map_err(|e| ScenarioError::Config(e.to_string()))
}

// ---------------------------------------------------------------------------
// Runner and outputs
// ---------------------------------------------------------------------------

/// Parses a config from JSON text.
pub fn parse_config(text: &str) -> SResult<ScenarioConfig> {
    let config: ScenarioConfig =
        serde_json::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
    if config.version != 1 {
        return Err(ScenarioError::Config(format!("unsupported config version {}", config.version)));
    }
    Ok(config)
}

/// Runs a parsed scenario. `base_dir` resolves relative file references;
/// `seed_override` takes precedence over the config's seed.
pub fn run_scenario(
    config: &ScenarioConfig,
    base_dir: &Path,
    seed_override: Option<u64>,
) -> SResult<Report> {
    let space = build_space(&config.space, base_dir)?;
    let mut paths = BTreeMap::new();
    for (name, spec) in &config.paths {
        paths.insert(name.clone(), build_path(name, spec, &space)?);
    }
    let mut sets = BTreeMap::new();
    for (name, spec) in &config.sets {
        let mut pts = Vec::with_capacity(spec.points.len());
        for p in &spec.points {
            pts.push(resolve_point(p, &space)?);
        }
        let set = CompactSet::new(pts)
            .map_err(|e| ScenarioError::Config(format!("set `{name}`: {e}")))?
            .with_net_spacing(spec.net_spacing);
        sets.insert(name.clone(), set);
    }
    let ctx = Context { space, paths, sets, seed: seed_override.unwrap_or(config.seed) };
    let mut checks = Vec::with_capacity(config.checks.len());
    for (index, spec) in config.checks.iter().enumerate() {
        checks.push(run_check(&ctx, index, spec)?);
    }
    Ok(Report { scenario: config.name.clone(), seed: ctx.seed, checks })
}

fn format_cell(v: f64) -> String {
    // Shortest round-trip formatting keeps the bytes reproducible.
    format!("{v}")
}

/// Writes one CSV per convergence-bearing check plus `summary.csv`.
/// Output bytes are stable across runs for identical inputs.
pub fn emit_tables(report: &Report, dir: &Path) -> SResult<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| ScenarioError::Io(e.to_string()))?;
    let mut written = Vec::new();
    for check in &report.checks {
        if let Some(table) = &check.table {
            let mut text = String::new();
            text.push_str(&table.header.join(","));
            text.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|&v| format_cell(v)).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            let file = dir.join(format!("{:02}_{}.csv", check.index, table.name));
            std::fs::write(&file, text).map_err(|e| ScenarioError::Io(e.to_string()))?;
            written.push(file);
        }
    }
    let mut summary = String::from("index,op,status,error_bound\n");
    for check in &report.checks {
        let status = match check.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Diagnostic => "diagnostic",
        };
        let bound = check.error_bound.map(format_cell).unwrap_or_default();
        summary.push_str(&format!("{},{},{},{}\n", check.index, check.op, status, bound));
    }
    let file = dir.join("summary.csv");
    std::fs::write(&file, summary).map_err(|e| ScenarioError::Io(e.to_string()))?;
    written.push(file);
    Ok(written)
}

/// Writes the full report (including runtimes) as pretty JSON.
pub fn write_report_json(report: &Report, dir: &Path) -> SResult<std::path::PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| ScenarioError::Io(e.to_string()))?;
    let file = dir.join("report.json");
    let text = serde_json::to_string_pretty(report).map_err(|e| ScenarioError::Io(e.to_string()))?;
    std::fs::write(&file, text + "\n").map_err(|e| ScenarioError::Io(e.to_string()))?;
    Ok(file)
}

/// Bundled scenario corpus: one scenario per construction the checks cover.
pub fn bundled_scenarios() -> &'static [(&'static str, &'static str)] {
    &[
        ("plane_angles", include_str!("../scenarios/plane_angles.json")),
        ("sphere_angles", include_str!("../scenarios/sphere_angles.json")),
        ("hyperbolic_angles", include_str!("../scenarios/hyperbolic_angles.json")),
        ("taxicab_angles", include_str!("../scenarios/taxicab_angles.json")),
        ("taxicab_curvature", include_str!("../scenarios/taxicab_curvature.json")),
        ("taxicab_bifurcation", include_str!("../scenarios/taxicab_bifurcation.json")),
        ("sphere_supplementary", include_str!("../scenarios/sphere_supplementary.json")),
        ("sphere_first_variation", include_str!("../scenarios/sphere_first_variation.json")),
        ("plane_first_variation", include_str!("../scenarios/plane_first_variation.json")),
        ("sphere_two_point_set", include_str!("../scenarios/sphere_two_point_set.json")),
        ("thin_triangles", include_str!("../scenarios/thin_triangles.json")),
        ("cube_refinement", include_str!("../scenarios/cube_refinement.json")),
        ("comparison_roundtrip", include_str!("../scenarios/comparison_roundtrip.json")),
    ]
}

/// Looks up a bundled scenario by name.
pub fn bundled_scenario(name: &str) -> Option<&'static str> {
    bundled_scenarios().iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
