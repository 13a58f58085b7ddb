//! Metric-space abstraction with concrete instances: the analytic model
//! surfaces, the taxicab plane, general metric graphs, and triangulated
//! cube surfaces.

pub mod cube;
pub mod graph;
mod path;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::model::{exp_map, geodesic_point, model_distance, Curvature, ModelPoint};

pub use graph::MetricGraph;
pub use path::SampledPath;

/// A point of one of the supported spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    /// A chart point of a model surface.
    Model(ModelPoint),
    /// A point of the taxicab plane.
    Taxicab([f64; 2]),
    /// An ambient coordinate on a graph-discretized space; snapped to the
    /// nearest mesh vertex when used.
    Xyz([f64; 3]),
    /// A graph vertex id.
    Vertex(usize),
}

impl Point {
    pub fn plane(x: f64, y: f64) -> Self {
        Point::Model(ModelPoint::plane(x, y))
    }

    pub fn taxicab(x: f64, y: f64) -> Self {
        Point::Taxicab([x, y])
    }

    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

/// Handle to a metric space: distance plus a shortest-path oracle.
///
/// Cloning is cheap; graph-backed kinds share the mesh.
#[derive(Debug, Clone)]
pub enum SpaceHandle {
    /// The model surface of curvature `k`.
    Model(Curvature),
    /// The plane with the `l1` metric.
    Taxicab,
    /// A general metric graph (the graph is the space; distances are exact).
    Graph(Arc<MetricGraph>),
    /// Triangulated cube surface at a refinement level, with the recorded
    /// additive error bound against the underlying surface metric.
    CubeSurface { mesh: Arc<MetricGraph>, edge: f64, level: u32, certified: f64 },
}

impl SpaceHandle {
    pub fn model(k: Curvature) -> Self {
        SpaceHandle::Model(k)
    }

    pub fn plane() -> Self {
        SpaceHandle::Model(Curvature::FLAT)
    }

    pub fn taxicab() -> Self {
        SpaceHandle::Taxicab
    }

    pub fn from_graph(graph: MetricGraph) -> Self {
        SpaceHandle::Graph(Arc::new(graph))
    }

    /// Cube surface of the given edge length with `4^level` cells per face.
    pub fn cube_surface(edge: f64, level: u32) -> Result<Self> {
        let (mesh, certified) = cube::build_cube_mesh(edge, level)?;
        Ok(SpaceHandle::CubeSurface { mesh: Arc::new(mesh), edge, level, certified })
    }

    /// Additive bound on how far reported distances may sit above the
    /// space's intended metric. Zero for exact kinds.
    pub fn certified_error(&self) -> f64 {
        match self {
            SpaceHandle::Model(_) | SpaceHandle::Taxicab | SpaceHandle::Graph(_) => 0.0,
            SpaceHandle::CubeSurface { certified, .. } => *certified,
        }
    }

    pub fn mesh(&self) -> Option<&Arc<MetricGraph>> {
        match self {
            SpaceHandle::Graph(g) => Some(g),
            SpaceHandle::CubeSurface { mesh, .. } => Some(mesh),
            _ => None,
        }
    }

    fn expect_model(&self, p: &Point) -> Result<ModelPoint> {
        match (self, p) {
            (SpaceHandle::Model(k), Point::Model(mp)) => {
                if mp.chart() == k.chart() {
                    Ok(*mp)
                } else {
                    Err(GeometryError::PointOutsideSpace(p.describe()))
                }
            }
            _ => Err(GeometryError::PointOutsideSpace(p.describe())),
        }
    }

    /// Snaps a point to the space's canonical representation, returning the
    /// snap distance (zero on analytic kinds).
    pub fn snap(&self, p: &Point) -> Result<(Point, f64)> {
        match self {
            SpaceHandle::Model(_) => Ok((Point::Model(self.expect_model(p)?), 0.0)),
            SpaceHandle::Taxicab => match p {
                Point::Taxicab(c) => Ok((Point::Taxicab(*c), 0.0)),
                _ => Err(GeometryError::PointOutsideSpace(p.describe())),
            },
            SpaceHandle::Graph(g) | SpaceHandle::CubeSurface { mesh: g, .. } => match p {
                Point::Vertex(v) if *v < g.vertex_count() => Ok((Point::Vertex(*v), 0.0)),
                Point::Vertex(v) => Err(GeometryError::PointOutsideSpace(format!("vertex {v}"))),
                Point::Xyz(c) => {
                    let (v, d) = g.nearest_vertex(*c);
                    Ok((Point::Vertex(v), d))
                }
                _ => Err(GeometryError::PointOutsideSpace(p.describe())),
            },
        }
    }

    fn vertex_of(&self, p: &Point) -> Result<usize> {
        match self.snap(p)?.0 {
            Point::Vertex(v) => Ok(v),
            _ => unreachable!("snap on graph kinds returns vertices"),
        }
    }

    /// Distance between two points of the space.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        match self {
            SpaceHandle::Model(k) => {
                model_distance(&self.expect_model(p)?, &self.expect_model(q)?, *k)
            }
            SpaceHandle::Taxicab => match (p, q) {
                (Point::Taxicab(a), Point::Taxicab(b)) => {
                    Ok((a[0] - b[0]).abs() + (a[1] - b[1]).abs())
                }
                _ => Err(GeometryError::PointOutsideSpace(p.describe())),
            },
            SpaceHandle::Graph(g) | SpaceHandle::CubeSurface { mesh: g, .. } => {
                let u = self.vertex_of(p)?;
                let v = self.vertex_of(q)?;
                Ok(g.distance(u, v))
            }
        }
    }

    /// Point at arc length `s` along the canonical geodesic from `p` to `q`.
    /// Not available on graph kinds.
    pub fn interpolate(&self, p: &Point, q: &Point, s: f64) -> Result<Point> {
        match self {
            SpaceHandle::Model(k) => {
                let gp = geodesic_point(&self.expect_model(p)?, &self.expect_model(q)?, s, *k)?;
                Ok(Point::Model(gp))
            }
            SpaceHandle::Taxicab => match (p, q) {
                (Point::Taxicab(a), Point::Taxicab(b)) => {
                    let d = (a[0] - b[0]).abs() + (a[1] - b[1]).abs();
                    let tol = 1e-12 * (1.0 + d);
                    if !(-tol..=d + tol).contains(&s) {
                        return Err(GeometryError::OutOfRange { what: "arc length s", value: s, min: 0.0, max: d });
                    }
                    if d == 0.0 {
                        return Ok(*p);
                    }
                    // Linear interpolation: exact for segments that are
                    // monotone in both coordinates, which is what the
                    // canonical staircase paths produce.
                    let f = (s / d).clamp(0.0, 1.0);
                    Ok(Point::Taxicab([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]))
                }
                _ => Err(GeometryError::PointOutsideSpace(p.describe())),
            },
            _ => Err(GeometryError::InterpolationUnsupported),
        }
    }

    /// Unit-speed sampled shortest path from `p` to `q`.
    ///
    /// Analytic kinds return the exact geodesic sampled at spacing at most
    /// `resolution`; the taxicab plane returns the canonical axis-aligned
    /// staircase (x-leg first); graph kinds return the lexicographically
    /// smallest graph geodesic (`resolution` is ignored, the mesh fixes it).
    pub fn shortest_path(&self, p: &Point, q: &Point, resolution: f64) -> Result<SampledPath> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(GeometryError::OutOfRange { what: "resolution", value: resolution, min: 0.0, max: f64::INFINITY });
        }
        match self {
            SpaceHandle::Model(k) => {
                let a = self.expect_model(p)?;
                let b = self.expect_model(q)?;
                let d = model_distance(&a, &b, *k)?;
                let n = ((d / resolution).ceil() as usize).max(1);
                let mut samples = Vec::with_capacity(n + 1);
                samples.push((0.0, Point::Model(a)));
                for i in 1..n {
                    let s = d * i as f64 / n as f64;
                    samples.push((s, Point::Model(geodesic_point(&a, &b, s, *k)?)));
                }
                samples.push((d, Point::Model(b)));
                SampledPath::new(self.clone(), samples)
            }
            SpaceHandle::Taxicab => {
                let (a, b) = match (p, q) {
                    (Point::Taxicab(a), Point::Taxicab(b)) => (*a, *b),
                    _ => return Err(GeometryError::PointOutsideSpace(p.describe())),
                };
                let corner = [b[0], a[1]];
                let mut samples = vec![(0.0, Point::Taxicab(a))];
                let mut t = 0.0;
                let leg = |from: [f64; 2], to: [f64; 2], t0: f64, samples: &mut Vec<(f64, Point)>| {
                    let len = (from[0] - to[0]).abs() + (from[1] - to[1]).abs();
                    if len == 0.0 {
                        return t0;
                    }
                    let n = ((len / resolution).ceil() as usize).max(1);
                    for i in 1..=n {
                        let f = i as f64 / n as f64;
                        let pt = [from[0] + f * (to[0] - from[0]), from[1] + f * (to[1] - from[1])];
                        samples.push((t0 + f * len, Point::Taxicab(pt)));
                    }
                    t0 + len
                };
                t = leg(a, corner, t, &mut samples);
                leg(corner, b, t, &mut samples);
                if samples.len() == 1 {
                    samples.push((0.0, Point::Taxicab(b)));
                    return Err(GeometryError::DegeneratePath("coincident endpoints".into()));
                }
                SampledPath::new(self.clone(), samples)
            }
            SpaceHandle::Graph(g) | SpaceHandle::CubeSurface { mesh: g, .. } => {
                let u = self.vertex_of(p)?;
                let v = self.vertex_of(q)?;
                let path = g.shortest_vertex_path(u, v)?;
                Self::vertex_path_to_samples(self, g, &path)
            }
        }
    }

    /// All canonical shortest paths from `p` to `q`. Analytic kinds return a
    /// single representative; graph kinds enumerate every geodesic within
    /// the tie tolerance (lexicographic order, capped).
    pub fn shortest_paths(&self, p: &Point, q: &Point, resolution: f64, cap: usize) -> Result<Vec<SampledPath>> {
        match self {
            SpaceHandle::Graph(g) | SpaceHandle::CubeSurface { mesh: g, .. } => {
                let u = self.vertex_of(p)?;
                let v = self.vertex_of(q)?;
                let paths = g.shortest_vertex_paths(u, v, cap)?;
                paths
                    .iter()
                    .map(|path| Self::vertex_path_to_samples(self, g, path))
                    .collect()
            }
            _ => Ok(vec![self.shortest_path(p, q, resolution)?]),
        }
    }

    fn vertex_path_to_samples(space: &SpaceHandle, g: &Arc<MetricGraph>, path: &[usize]) -> Result<SampledPath> {
        if path.len() < 2 {
            return Err(GeometryError::DegeneratePath("graph geodesic with a single vertex".into()));
        }
        let mut samples = Vec::with_capacity(path.len());
        let mut t = 0.0;
        samples.push((0.0, Point::Vertex(path[0])));
        for w in path.windows(2) {
            let len = g
                .neighbors(w[0])
                .iter()
                .find(|(v, _)| *v == w[1])
                .map(|(_, l)| *l)
                .ok_or_else(|| GeometryError::MalformedGraph("path step without an edge".into()))?;
            t += len;
            samples.push((t, Point::Vertex(w[1])));
        }
        SampledPath::new(space.clone(), samples)
    }

    /// Uniform-ish random point in the metric ball around `center`.
    /// On graph kinds, a uniformly chosen mesh vertex of the ball.
    pub fn sample_in_region<R: Rng + ?Sized>(&self, center: &Point, radius: f64, rng: &mut R) -> Result<Point> {
        match self {
            SpaceHandle::Model(k) => {
                let c = self.expect_model(center)?;
                let az = rng.random_range(0.0..std::f64::consts::TAU);
                let r = radius * rng.random_range(0.0f64..1.0).sqrt();
                Ok(Point::Model(exp_map(&c, az, r, *k)?))
            }
            SpaceHandle::Taxicab => match center {
                Point::Taxicab(c) => Ok(Point::Taxicab([
                    c[0] + rng.random_range(-radius..=radius),
                    c[1] + rng.random_range(-radius..=radius),
                ])),
                _ => Err(GeometryError::PointOutsideSpace(center.describe())),
            },
            SpaceHandle::Graph(g) | SpaceHandle::CubeSurface { mesh: g, .. } => {
                let c = self.vertex_of(center)?;
                let dist = g.distances_from(c);
                let ball: Vec<usize> =
                    (0..g.vertex_count()).filter(|&v| dist[v] <= radius).collect();
                if ball.is_empty() {
                    return Err(GeometryError::PointOutsideSpace("empty region".into()));
                }
                Ok(Point::Vertex(ball[rng.random_range(0..ball.len())]))
            }
        }
    }
}
