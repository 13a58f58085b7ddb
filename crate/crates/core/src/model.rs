//! Exact geometry of the two-dimensional simply-connected space forms.
//!
//! A curvature value `k` selects a model surface: the Euclidean plane for
//! `k = 0`, a sphere of radius `1/sqrt(k)` for `k > 0`, and a hyperbolic
//! plane of curvature `k` for `k < 0`. Points live in embedding-normalized
//! charts (the plane, the unit sphere, the unit hyperboloid) with the
//! physical scale folded into `k`, so every trig identity below takes
//! arguments already multiplied by `sqrt(|k|)`.
//!
//! Distances use chord-based forms (`atan2` on the sphere, `asinh` on the
//! hyperboloid) which agree with the usual `arccos` / `arccosh` expressions
//! but stay accurate down to separations near machine epsilon. The angle
//! estimators feed side lengths as small as `1e-7` through these kernels,
//! so the cancellation-free forms are load-bearing, not cosmetic.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Tolerance for renormalizing sphere/hyperboloid coordinates after
/// interpolation.
pub const CHART_TOL: f64 = 1e-12;

/// How far off the chart constraint an input point may be before it is
/// rejected instead of renormalized.
const CHART_INPUT_TOL: f64 = 1e-6;

const DEGENERATE_TOL: f64 = 1e-12;

/// Real curvature parameter selecting the model surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(GeometryError::InvalidCurvature(k));
        }
        Ok(Curvature(k))
    }

    pub fn k(self) -> f64 {
        self.0
    }

    /// `sqrt(|k|)`; the factor that converts physical lengths to chart arguments.
    pub fn scale(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// Diameter of the model surface: `pi / sqrt(k)` for `k > 0`, infinite otherwise.
    pub fn diameter(self) -> f64 {
        if self.0 > 0.0 {
            std::f64::consts::PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    pub fn chart(self) -> Chart {
        if self.0 > 0.0 {
            Chart::Sphere
        } else if self.0 < 0.0 {
            Chart::Hyperboloid
        } else {
            Chart::Plane
        }
    }
}

impl TryFrom<f64> for Curvature {
    type Error = GeometryError;
    fn try_from(k: f64) -> Result<Self> {
        Curvature::new(k)
    }
}

impl From<Curvature> for f64 {
    fn from(k: Curvature) -> f64 {
        k.0
    }
}

/// Diameter of the model surface of curvature `k`.
pub fn diameter(k: Curvature) -> f64 {
    k.diameter()
}

/// Coordinate chart a model point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Plane,
    Sphere,
    Hyperboloid,
}

/// A point of the model surface in its embedding-normalized chart.
///
/// Sphere coordinates lie on the unit sphere, hyperboloid coordinates on
/// `z^2 - x^2 - y^2 = 1, z >= 1`; the physical radius is carried by `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", content = "coords", rename_all = "snake_case")]
pub enum ModelPoint {
    Plane([f64; 2]),
    Sphere([f64; 3]),
    Hyperboloid([f64; 3]),
}

impl ModelPoint {
    pub fn plane(x: f64, y: f64) -> Self {
        ModelPoint::Plane([x, y])
    }

    /// A point on the unit sphere; inputs within `1e-6` of unit norm are renormalized.
    pub fn sphere(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && (n - 1.0).abs() <= CHART_INPUT_TOL) {
            return Err(GeometryError::InvalidChartPoint {
                chart: Chart::Sphere,
                coords: [x, y, z],
                residual: n - 1.0,
            });
        }
        Ok(ModelPoint::Sphere([x / n, y / n, z / n]))
    }

    /// A point on the unit hyperboloid `z^2 - x^2 - y^2 = 1`.
    pub fn hyperboloid(x: f64, y: f64, z: f64) -> Result<Self> {
        let q = z * z - x * x - y * y;
        if !(q.is_finite() && (q - 1.0).abs() <= CHART_INPUT_TOL * (1.0 + z * z) && z > 0.0) {
            return Err(GeometryError::InvalidChartPoint {
                chart: Chart::Hyperboloid,
                coords: [x, y, z],
                residual: q - 1.0,
            });
        }
        let s = q.sqrt();
        Ok(ModelPoint::Hyperboloid([x / s, y / s, z / s]))
    }

    /// Canonical base point of a chart: the plane origin, the sphere's north
    /// pole, or the hyperboloid apex.
    pub fn origin(chart: Chart) -> Self {
        match chart {
            Chart::Plane => ModelPoint::Plane([0.0, 0.0]),
            Chart::Sphere => ModelPoint::Sphere([0.0, 0.0, 1.0]),
            Chart::Hyperboloid => ModelPoint::Hyperboloid([0.0, 0.0, 1.0]),
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            ModelPoint::Plane(_) => Chart::Plane,
            ModelPoint::Sphere(_) => Chart::Sphere,
            ModelPoint::Hyperboloid(_) => Chart::Hyperboloid,
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        match self {
            ModelPoint::Plane(c) => c.to_vec(),
            ModelPoint::Sphere(c) | ModelPoint::Hyperboloid(c) => c.to_vec(),
        }
    }

    /// Residual of the chart constraint; zero for plane points.
    pub fn chart_residual(&self) -> f64 {
        match self {
            ModelPoint::Plane(_) => 0.0,
            ModelPoint::Sphere(c) => (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() - 1.0,
            ModelPoint::Hyperboloid(c) => (c[2] * c[2] - c[0] * c[0] - c[1] * c[1]) - 1.0,
        }
    }

    fn check_chart(&self, k: Curvature) -> Result<()> {
        if self.chart() == k.chart() {
            Ok(())
        } else {
            Err(GeometryError::ChartMismatch {
                expected: k.chart(),
                found: self.chart(),
                k: k.k(),
            })
        }
    }
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Minkowski form `x1 x2 + y1 y2 - z1 z2` used by the hyperboloid chart.
fn mdot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

fn renorm_sphere(v: [f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    scale3(v, 1.0 / n)
}

fn renorm_hyperboloid(v: [f64; 3]) -> [f64; 3] {
    let q = v[2] * v[2] - v[0] * v[0] - v[1] * v[1];
    scale3(v, 1.0 / q.sqrt())
}

/// Geodesic distance between two model points.
///
/// Equals the Euclidean norm for `k = 0`, `arccos` of the inner product
/// scaled by `1/sqrt(k)` on the sphere, and `arccosh` of the Minkowski
/// product scaled by `1/sqrt(-k)` on the hyperboloid, evaluated through
/// chord-based forms that avoid cancellation at small separations.
pub fn model_distance(p: &ModelPoint, q: &ModelPoint, k: Curvature) -> Result<f64> {
    p.check_chart(k)?;
    q.check_chart(k)?;
    match (p, q) {
        (ModelPoint::Plane(a), ModelPoint::Plane(b)) => Ok((a[0] - b[0]).hypot(a[1] - b[1])),
        (ModelPoint::Sphere(a), ModelPoint::Sphere(b)) => {
            // theta = 2 atan2(|a-b|, |a+b|) is arccos(<a,b>) without the
            // conditioning loss at theta near 0 or pi.
            let theta = 2.0 * norm3(sub3(*a, *b)).atan2(norm3(add3(*a, *b)));
            Ok(theta / k.scale())
        }
        (ModelPoint::Hyperboloid(a), ModelPoint::Hyperboloid(b)) => {
            // <a-b, a-b>_M = 2(cosh d - 1) = 4 sinh^2(d/2), nonnegative up to rounding.
            let m = mdot(sub3(*a, *b), sub3(*a, *b)).max(0.0);
            Ok(2.0 * (m.sqrt() / 2.0).asinh() / k.scale())
        }
        _ => unreachable!("chart check admits mixed charts"),
    }
}

/// Point at arc length `s` along the unique shortest path from `p` to `q`.
pub fn geodesic_point(p: &ModelPoint, q: &ModelPoint, s: f64, k: Curvature) -> Result<ModelPoint> {
    let d = model_distance(p, q, k)?;
    let tol = 1e-12 * (1.0 + d);
    if !((-tol..=d + tol).contains(&s)) {
        return Err(GeometryError::OutOfRange { what: "arc length s", value: s, min: 0.0, max: d });
    }
    if d <= DEGENERATE_TOL {
        return Ok(*p);
    }
    if k.k() > 0.0 && d >= k.diameter() * (1.0 - 1e-9) {
        return Err(GeometryError::AntipodalPoints { k: k.k() });
    }
    let s = s.clamp(0.0, d);
    let f = s / d;
    match (p, q) {
        (ModelPoint::Plane(a), ModelPoint::Plane(b)) => Ok(ModelPoint::Plane([
            a[0] + f * (b[0] - a[0]),
            a[1] + f * (b[1] - a[1]),
        ])),
        (ModelPoint::Sphere(a), ModelPoint::Sphere(b)) => {
            let theta = d * k.scale();
            let st = theta.sin();
            let v = add3(
                scale3(*a, ((1.0 - f) * theta).sin() / st),
                scale3(*b, (f * theta).sin() / st),
            );
            Ok(ModelPoint::Sphere(renorm_sphere(v)))
        }
        (ModelPoint::Hyperboloid(a), ModelPoint::Hyperboloid(b)) => {
            let phi = d * k.scale();
            let sh = phi.sinh();
            let v = add3(
                scale3(*a, ((1.0 - f) * phi).sinh() / sh),
                scale3(*b, (f * phi).sinh() / sh),
            );
            Ok(ModelPoint::Hyperboloid(renorm_hyperboloid(v)))
        }
        _ => unreachable!(),
    }
}

/// Unit tangent vector at `a` pointing along the geodesic toward `b`,
/// in ambient coordinates of the chart.
fn tangent_toward(a: &ModelPoint, b: &ModelPoint, k: Curvature) -> Result<[f64; 3]> {
    let d = model_distance(a, b, k)?;
    if d <= DEGENERATE_TOL {
        return Err(GeometryError::DegenerateVertex { separation: d });
    }
    match (a, b) {
        (ModelPoint::Plane(p), ModelPoint::Plane(q)) => {
            let v = [q[0] - p[0], q[1] - p[1], 0.0];
            Ok(scale3(v, 1.0 / norm3(v)))
        }
        (ModelPoint::Sphere(p), ModelPoint::Sphere(q)) => {
            if d >= k.diameter() * (1.0 - 1e-9) {
                return Err(GeometryError::AntipodalPoints { k: k.k() });
            }
            let v = sub3(*q, scale3(*p, dot3(*p, *q)));
            Ok(scale3(v, 1.0 / norm3(v)))
        }
        (ModelPoint::Hyperboloid(p), ModelPoint::Hyperboloid(q)) => {
            // q = cosh(phi) p + sinh(phi) u with cosh(phi) = -<p,q>_M.
            let v = sub3(*q, scale3(*p, -mdot(*p, *q)));
            let n = mdot(v, v).max(0.0).sqrt();
            Ok(scale3(v, 1.0 / n))
        }
        _ => unreachable!(),
    }
}

/// Interior angle at vertex `a` between the geodesics toward `b` and `c`,
/// measured from initial tangent directions in the chart.
pub fn vertex_angle(a: &ModelPoint, b: &ModelPoint, c: &ModelPoint, k: Curvature) -> Result<f64> {
    let u = tangent_toward(a, b, k)?;
    let v = tangent_toward(a, c, k)?;
    match a.chart() {
        Chart::Plane | Chart::Sphere => Ok(norm3(cross3(u, v)).atan2(dot3(u, v))),
        Chart::Hyperboloid => {
            // The Minkowski form is positive definite on the tangent plane.
            Ok(mdot(u, v).clamp(-1.0, 1.0).acos())
        }
    }
}

/// Deterministic orthonormal tangent basis at `p` (Minkowski-orthonormal on
/// the hyperboloid).
fn tangent_basis(p: &ModelPoint) -> ([f64; 3], [f64; 3]) {
    match p {
        ModelPoint::Plane(_) => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        ModelPoint::Sphere(c) => {
            let seed = if c[0].abs() < 0.5 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let e1 = {
                let v = sub3(seed, scale3(*c, dot3(seed, *c)));
                scale3(v, 1.0 / norm3(v))
            };
            let e2 = cross3(*c, e1);
            (e1, e2)
        }
        ModelPoint::Hyperboloid(c) => {
            let seed = if c[0].abs() < 0.5 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            // Project out the (timelike) position component: v = seed + <seed,c>_M c.
            let v = add3(seed, scale3(*c, mdot(seed, *c)));
            let e1 = scale3(v, 1.0 / mdot(v, v).sqrt());
            let mut w = [0.0, 1.0, 0.0];
            w = add3(w, scale3(*c, mdot(w, *c)));
            w = sub3(w, scale3(e1, mdot(w, e1)));
            let e2 = scale3(w, 1.0 / mdot(w, w).sqrt());
            (e1, e2)
        }
    }
}

/// Point at distance `r` from `base` along the geodesic with the given
/// azimuth in the deterministic tangent frame at `base`.
pub fn exp_map(base: &ModelPoint, azimuth: f64, r: f64, k: Curvature) -> Result<ModelPoint> {
    base.check_chart(k)?;
    if r < 0.0 {
        return Err(GeometryError::OutOfRange { what: "radius r", value: r, min: 0.0, max: f64::INFINITY });
    }
    let (e1, e2) = tangent_basis(base);
    let dir = add3(scale3(e1, azimuth.cos()), scale3(e2, azimuth.sin()));
    match base {
        ModelPoint::Plane(c) => Ok(ModelPoint::Plane([c[0] + r * dir[0], c[1] + r * dir[1]])),
        ModelPoint::Sphere(c) => {
            let rho = r * k.scale();
            let v = add3(scale3(*c, rho.cos()), scale3(dir, rho.sin()));
            Ok(ModelPoint::Sphere(renorm_sphere(v)))
        }
        ModelPoint::Hyperboloid(c) => {
            let rho = r * k.scale();
            let v = add3(scale3(*c, rho.cosh()), scale3(dir, rho.sinh()));
            Ok(ModelPoint::Hyperboloid(renorm_hyperboloid(v)))
        }
    }
}
