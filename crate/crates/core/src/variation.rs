//! Distance to a compact set along a geodesic, its one-sided derivative,
//! and curvature-bound sampling.
//!
//! The central check confirms numerically that the right-derivative of
//! `l(t) = d(gamma(t), K)` at zero equals `-cos` of the minimal angle
//! between `gamma` and the shortest paths realizing `d(gamma(0), K)`. The
//! compact set is a finite point list (an epsilon-net standing in for `K`);
//! its spacing enters the combined tolerance linearly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::angles::{estimate_angles, GridSchedule};
use crate::comparison::{comparison_point, embed_triangle, Side, TriangleSides};
use crate::error::{GeometryError, Result};
use crate::model::{model_distance, Curvature};
use crate::spaces::{Point, SampledPath, SpaceHandle};

pub use crate::angles::BoundDirection;

/// Cap on enumerated geodesic representatives per foot point.
const GEODESIC_CAP: usize = 32;

/// A compact set represented by a finite point list.
#[derive(Debug, Clone, Serialize)]
pub struct CompactSet {
    points: Vec<Point>,
    net_spacing: f64,
}

impl CompactSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(GeometryError::EmptySet);
        }
        Ok(CompactSet { points, net_spacing: 0.0 })
    }

    /// Records the net spacing of the finite approximation; it is added to
    /// the combined tolerance of the first-variation check.
    pub fn with_net_spacing(mut self, spacing: f64) -> Self {
        self.net_spacing = spacing.max(0.0);
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn net_spacing(&self) -> f64 {
        self.net_spacing
    }
}

/// Minimum distance from `p` to the set and the index of the minimizing
/// point. Exact minimum over the finite net; ties resolve to the smallest
/// index.
pub fn distance_to_set(space: &SpaceHandle, p: &Point, set: &CompactSet) -> Result<(f64, usize)> {
    let mut best = (f64::INFINITY, 0usize);
    for (i, q) in set.points().iter().enumerate() {
        let d = space.distance(p, q)?;
        if d < best.0 {
            best = (d, i);
        }
    }
    Ok(best)
}

/// A near-minimizing point of the set together with the estimated upper
/// angle between `gamma` and a shortest path to it.
#[derive(Debug, Clone, Serialize)]
pub struct FootPoint {
    pub index: usize,
    pub point: Point,
    pub distance: f64,
    pub angle_upper: f64,
    pub angle_error: f64,
}

/// Result of minimizing the path angle over near-minimizers of the set.
#[derive(Debug, Clone, Serialize)]
pub struct MinAngleReport {
    pub angle: f64,
    pub angle_error: f64,
    pub ell0: f64,
    pub feet: Vec<FootPoint>,
}

/// Minimal upper angle between `gamma` and shortest paths to the
/// near-minimizers of the set (all points within `slack` of the minimal
/// distance). On graph spaces every tied geodesic representative enters the
/// minimum.
pub fn min_angle_to_set(
    space: &SpaceHandle,
    gamma: &SampledPath,
    set: &CompactSet,
    slack: f64,
    k: Curvature,
    grid: Option<&GridSchedule>,
) -> Result<MinAngleReport> {
    if slack < 0.0 {
        return Err(GeometryError::OutOfRange { what: "slack", value: slack, min: 0.0, max: f64::INFINITY });
    }
    let origin = *gamma.origin();
    let (ell0, _) = distance_to_set(space, &origin, set)?;
    if ell0 <= 2.0 * space.certified_error() + 1e-12 {
        return Err(GeometryError::OriginInsideSet { distance: ell0 });
    }
    let resolution = (ell0 / 64.0).min(gamma.length() / 64.0);
    let mut feet = Vec::new();
    let mut best: Option<(f64, f64)> = None; // (angle, error)
    for (i, q) in set.points().iter().enumerate() {
        let d = space.distance(&origin, q)?;
        if d > ell0 + slack {
            continue;
        }
        let paths = space.shortest_paths(&origin, q, resolution, GEODESIC_CAP)?;
        for path in &paths {
            let grid_here = match grid {
                Some(g) => *g,
                None => GridSchedule::default_for(gamma, path)?,
            };
            let est = estimate_angles(space, gamma, path, k, &grid_here)?;
            feet.push(FootPoint {
                index: i,
                point: *q,
                distance: d,
                angle_upper: est.upper,
                angle_error: est.error_bound,
            });
            if best.map_or(true, |(a, _)| est.upper < a) {
                best = Some((est.upper, est.error_bound));
            }
        }
    }
    let (angle, angle_error) = best.ok_or(GeometryError::EmptySet)?;
    Ok(MinAngleReport { angle, angle_error, ell0, feet })
}

/// One-sided difference quotients of `l(t) = d(gamma(t), K)` at a shrinking
/// schedule, the extrapolated right-derivative, and its residual against
/// `-cos` of the minimal angle.
#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    /// `(t, (l(t) - l(0)) / t)` with strictly decreasing `t`.
    pub quotients: Vec<(f64, f64)>,
    /// Per-step first-order Richardson extrapolants (diagnostic column).
    pub extrapolants: Vec<f64>,
    pub ell0: f64,
    pub angle_min: f64,
    /// Polynomial extrapolation of the last three quotients to `t = 0`.
    pub limit_estimate: f64,
    /// `|limit_estimate - (-cos(angle_min))|`.
    pub residual: f64,
    pub combined_tolerance: f64,
    /// Whether every quotient at the three smallest scales respects the
    /// one-sided upper bound `-cos(angle_min)` up to tolerance.
    pub upper_bound_ok: bool,
    pub foot_points: Vec<FootPoint>,
}

/// Builds the default schedule `t_j = t0 * factor^j`.
pub fn geometric_schedule(t0: f64, factor: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| t0 * factor.powi(j as i32)).collect()
}

/// Polynomial extrapolation to zero through up to three trailing samples.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let tail = &points[points.len().saturating_sub(3)..];
    // Lagrange evaluation at t = 0.
    let mut acc = 0.0;
    for (i, &(ti, qi)) in tail.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(tj, _)) in tail.iter().enumerate() {
            if i != j {
                w *= tj / (tj - ti);
            }
        }
        acc += w * qi;
    }
    acc
}

/// Verifies the first-variation identity for `gamma` against the set.
///
/// `t_schedule` must be strictly decreasing and lie inside the path's
/// parameter domain; when empty the default `T/8 * 2^-j, j = 0..14` is used.
pub fn first_variation_check(
    space: &SpaceHandle,
    gamma: &SampledPath,
    set: &CompactSet,
    k: Curvature,
    t_schedule: &[f64],
    grid: Option<&GridSchedule>,
) -> Result<VariationReport> {
    let origin = *gamma.origin();
    let (ell0, _) = distance_to_set(space, &origin, set)?;
    let cert = space.certified_error();
    if ell0 <= 2.0 * cert + 1e-12 {
        return Err(GeometryError::OriginInsideSet { distance: ell0 });
    }
    let domain = gamma.domain_length();
    let schedule: Vec<f64> = if t_schedule.is_empty() {
        geometric_schedule(domain / 8.0, 0.5, 15)
    } else {
        t_schedule.to_vec()
    };
    for (i, w) in schedule.windows(2).enumerate() {
        if !(w[1] < w[0]) {
            return Err(GeometryError::InvalidSchedule(format!(
                "t_schedule must strictly decrease (index {i})"
            )));
        }
    }
    if let Some(&t0) = schedule.first() {
        if !(t0 > 0.0 && t0 <= domain * (1.0 + 1e-12)) {
            return Err(GeometryError::OutOfRange { what: "t_schedule start", value: t0, min: 0.0, max: domain });
        }
    } else {
        return Err(GeometryError::InvalidSchedule("empty schedule".into()));
    }

    let (g0, _) = gamma.domain();
    let mut quotients = Vec::with_capacity(schedule.len());
    for &t in &schedule {
        let (_, p) = gamma.point_at(g0 + t)?;
        let (ell_t, _) = distance_to_set(space, &p, set)?;
        quotients.push((t, (ell_t - ell0) / t));
    }
    let mut extrapolants = Vec::with_capacity(quotients.len());
    extrapolants.push(quotients[0].1);
    for w in quotients.windows(2) {
        let (t_prev, q_prev) = w[0];
        let (t_cur, q_cur) = w[1];
        let r = t_prev / t_cur;
        extrapolants.push((r * q_cur - q_prev) / (r - 1.0));
    }
    let limit_estimate = extrapolate_to_zero(&quotients);

    let slack = 2.0 * set.net_spacing() + 2.0 * cert + 1e-9;
    let min_angle = min_angle_to_set(space, gamma, set, slack, k, grid)?;
    let target = -min_angle.angle.cos();
    let residual = (limit_estimate - target).abs();
    let combined_tolerance = min_angle.angle_error + set.net_spacing() + cert + 1e-9;

    // One-sided bound: sufficiently small quotients sit below the limit,
    // up to an O(t) term matching the thin-triangle rate.
    let upper_bound_ok = quotients
        .iter()
        .rev()
        .take(3)
        .all(|&(t, q)| q <= target + combined_tolerance + 10.0 * t);

    Ok(VariationReport {
        quotients,
        extrapolants,
        ell0: min_angle.ell0,
        angle_min: min_angle.angle,
        limit_estimate,
        residual,
        combined_tolerance,
        upper_bound_ok,
        foot_points: min_angle.feet,
    })
}

/// A geodesic triangle: three shortest paths `x -> y`, `x -> z`, `y -> z`.
#[derive(Debug, Clone)]
pub struct GeodesicTriangle {
    sides: [SampledPath; 3],
}

impl GeodesicTriangle {
    /// Assembles a triangle from explicit side paths, validating shared
    /// endpoints within the space's snap tolerance.
    pub fn from_sides(xy: SampledPath, xz: SampledPath, yz: SampledPath) -> Result<Self> {
        let space = xy.space().clone();
        let tol = 2.0 * space.certified_error() + 1e-9;
        let checks = [
            (xy.origin(), xz.origin()),
            (xy.endpoint(), yz.origin()),
            (xz.endpoint(), yz.endpoint()),
        ];
        for (a, b) in checks {
            let sep = space.distance(a, b)?;
            if sep > tol {
                return Err(GeometryError::OriginMismatch { separation: sep, tolerance: tol });
            }
        }
        Ok(GeodesicTriangle { sides: [xy, xz, yz] })
    }

    /// Builds a triangle on the space's canonical shortest paths.
    pub fn from_vertices(
        space: &SpaceHandle,
        x: &Point,
        y: &Point,
        z: &Point,
        resolution: f64,
    ) -> Result<Self> {
        GeodesicTriangle::from_sides(
            space.shortest_path(x, y, resolution)?,
            space.shortest_path(x, z, resolution)?,
            space.shortest_path(y, z, resolution)?,
        )
    }

    pub fn side(&self, side: Side) -> &SampledPath {
        match side {
            Side::Xy => &self.sides[0],
            Side::Xz => &self.sides[1],
            Side::Yz => &self.sides[2],
        }
    }

    /// Side lengths as a `TriangleSides` (a = |xy|, b = |xz|, c = |yz|).
    pub fn side_lengths(&self) -> Result<TriangleSides> {
        TriangleSides::new(self.sides[0].length(), self.sides[1].length(), self.sides[2].length())
    }
}

/// A witness pair violating the comparison-distance inequality.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub side_u: Side,
    pub arc_u: f64,
    pub side_v: Side,
    pub arc_v: f64,
    pub space_distance: f64,
    pub model_distance: f64,
    /// Signed excess in the direction of the violated inequality.
    pub excess: f64,
}

/// Checks the comparison inequality `d(u, v) <= d_k(u', v')` (direction
/// `Above`) or `>=` (direction `Below`) over a deterministic grid of point
/// pairs on the triangle's sides. Returns the violations found.
pub fn check_triangle_curvature(
    space: &SpaceHandle,
    tri: &GeodesicTriangle,
    k: Curvature,
    direction: BoundDirection,
    fractions_per_side: usize,
) -> Result<Vec<Violation>> {
    let sides = tri.side_lengths()?;
    let comparison = embed_triangle(&sides, k)?;
    let tol = 2.0 * space.certified_error() + 1e-9;
    let m = fractions_per_side.max(1);
    let fractions: Vec<f64> = (1..=m).map(|i| i as f64 / (m + 1) as f64).collect();

    let mut violations = Vec::new();
    for (si, side_u) in Side::ALL.iter().enumerate() {
        for side_v in &Side::ALL[si..] {
            for &fu in &fractions {
                for &fv in &fractions {
                    let lu = comparison.side_length(*side_u);
                    let lv = comparison.side_length(*side_v);
                    if lu == 0.0 || lv == 0.0 {
                        continue;
                    }
                    let arc_u = fu * lu;
                    let arc_v = fv * lv;
                    let (_, u) = tri.side(*side_u).point_at(arc_u)?;
                    let (_, v) = tri.side(*side_v).point_at(arc_v)?;
                    let d_space = space.distance(&u, &v)?;
                    let cu = comparison_point(&comparison, *side_u, arc_u)?;
                    let cv = comparison_point(&comparison, *side_v, arc_v)?;
                    let d_model = model_distance(&cu, &cv, k)?;
                    let excess = match direction {
                        BoundDirection::Above => d_space - d_model,
                        BoundDirection::Below => d_model - d_space,
                    };
                    if excess > tol {
                        violations.push(Violation {
                            side_u: *side_u,
                            arc_u,
                            side_v: *side_v,
                            arc_v,
                            space_distance: d_space,
                            model_distance: d_model,
                            excess,
                        });
                    }
                }
            }
        }
    }
    Ok(violations)
}

/// A metric ball to sample triangles from.
#[derive(Debug, Clone, Serialize)]
pub struct Region {
    pub center: Point,
    pub radius: f64,
}

/// Outcome of randomized curvature-bound sampling.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureBoundReport {
    pub trials: usize,
    pub pairs_checked: usize,
    pub violations_found: usize,
    /// Up to 16 recorded witnesses.
    pub witnesses: Vec<Violation>,
    pub max_excess: f64,
    pub seed: u64,
}

/// Samples random geodesic triangles in the region and checks the
/// comparison inequality for the declared direction on each. Degenerate or
/// inadmissible triples are resampled.
pub fn curvature_bound_test(
    space: &SpaceHandle,
    region: &Region,
    k: Curvature,
    direction: BoundDirection,
    trials: usize,
    seed: u64,
) -> Result<CurvatureBoundReport> {
    if trials < 1 {
        return Err(GeometryError::OutOfRange { what: "trials", value: trials as f64, min: 1.0, max: f64::INFINITY });
    }
    // Triangle perimeters are bounded by three ball diameters.
    if 6.0 * region.radius >= 2.0 * k.diameter() {
        return Err(GeometryError::SidesNotAdmissible {
            perimeter: 6.0 * region.radius,
            k: k.k(),
            bound: 2.0 * k.diameter(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fractions = 7;
    let resolution = (region.radius / 16.0).max(1e-6);
    let mut report = CurvatureBoundReport {
        trials,
        pairs_checked: 0,
        violations_found: 0,
        witnesses: Vec::new(),
        max_excess: 0.0,
        seed,
    };
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > trials * 20 {
            return Err(GeometryError::DegeneratePath(
                "could not sample enough nondegenerate triangles in the region".into(),
            ));
        }
        let x = space.sample_in_region(&region.center, region.radius, &mut rng)?;
        let y = space.sample_in_region(&region.center, region.radius, &mut rng)?;
        let z = space.sample_in_region(&region.center, region.radius, &mut rng)?;
        let dxy = space.distance(&x, &y)?;
        let dxz = space.distance(&x, &z)?;
        let dyz = space.distance(&y, &z)?;
        let min_side = region.radius * 1e-3;
        if dxy < min_side || dxz < min_side || dyz < min_side {
            continue;
        }
        let tri = match GeodesicTriangle::from_vertices(space, &x, &y, &z, resolution) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let violations = check_triangle_curvature(space, &tri, k, direction, fractions)?;
        report.pairs_checked += 6 * fractions * fractions;
        report.violations_found += violations.len();
        for v in violations {
            report.max_excess = report.max_excess.max(v.excess);
            if report.witnesses.len() < 16 {
                report.witnesses.push(v);
            }
        }
        done += 1;
    }
    Ok(report)
}

/// Taxicab geodesic triangle whose sides trace the rectangle through
/// `(0,0)`, `(2s, 0)`, `(2s, s)`, `(0, s)`: an equilateral triangle (side
/// `2s`) with vertices `(0,0)`, `(2s,0)`, `(s,s)`. Points on either side of
/// the top vertex are metrically collinear, which defeats any upper
/// curvature bound.
pub fn rectangle_circuit_triangle(scale: f64) -> Result<GeodesicTriangle> {
    let space = SpaceHandle::taxicab();
    let s = scale;
    let xy = SampledPath::from_points(
        space.clone(),
        vec![Point::taxicab(0.0, 0.0), Point::taxicab(2.0 * s, 0.0)],
    )?;
    let xz = SampledPath::from_points(
        space.clone(),
        vec![Point::taxicab(0.0, 0.0), Point::taxicab(0.0, s), Point::taxicab(s, s)],
    )?;
    let yz = SampledPath::from_points(
        space,
        vec![Point::taxicab(2.0 * s, 0.0), Point::taxicab(2.0 * s, s), Point::taxicab(s, s)],
    )?;
    GeodesicTriangle::from_sides(xy, xz, yz)
}

/// Taxicab geodesic triangle on the same vertices whose two upper sides
/// branch from a common stem through `(s, 0)`: distinct arc-length
/// positions coincide in space, which defeats any lower curvature bound.
pub fn branching_triangle(scale: f64) -> Result<GeodesicTriangle> {
    let space = SpaceHandle::taxicab();
    let s = scale;
    let xy = SampledPath::from_points(
        space.clone(),
        vec![Point::taxicab(0.0, 0.0), Point::taxicab(2.0 * s, 0.0)],
    )?;
    let xz = SampledPath::from_points(
        space.clone(),
        vec![Point::taxicab(0.0, 0.0), Point::taxicab(s, 0.0), Point::taxicab(s, s)],
    )?;
    let yz = SampledPath::from_points(
        space,
        vec![Point::taxicab(2.0 * s, 0.0), Point::taxicab(s, 0.0), Point::taxicab(s, s)],
    )?;
    GeodesicTriangle::from_sides(xy, xz, yz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{exp_map, Chart, ModelPoint};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    fn plane_ray(length: f64) -> SampledPath {
        SampledPath::from_points(
            SpaceHandle::plane(),
            (0..=64).map(|i| Point::plane(length * i as f64 / 64.0, 0.0)).collect(),
        )
        .unwrap()
    }

    fn sphere_ray(azimuth: f64, length: f64) -> SampledPath {
        let kk = k(1.0);
        let space = SpaceHandle::model(kk);
        let origin = ModelPoint::origin(Chart::Sphere);
        let tip = exp_map(&origin, azimuth, length, kk).unwrap();
        space
            .shortest_path(&Point::Model(origin), &Point::Model(tip), length / 64.0)
            .unwrap()
    }

    fn set(points: Vec<Point>) -> CompactSet {
        CompactSet::new(points).unwrap()
    }

    #[test]
    fn distance_to_set_basics() {
        let space = SpaceHandle::plane();
        let s = set(vec![Point::plane(3.0, 0.0), Point::plane(0.0, 4.0)]);
        let (d, i) = distance_to_set(&space, &Point::plane(0.0, 0.0), &s).unwrap();
        assert_eq!((d, i), (3.0, 0));
        let (d, i) = distance_to_set(&space, &Point::plane(3.0, 0.0), &s).unwrap();
        assert_eq!((d, i), (0.0, 0));
    }

    #[test]
    fn distance_to_set_tie_breaks_to_lower_id() {
        let kk = k(1.0);
        let space = SpaceHandle::model(kk);
        let pole = Point::Model(ModelPoint::origin(Chart::Sphere));
        let q0 = Point::Model(ModelPoint::sphere(1.0, 0.0, 0.0).unwrap());
        let q1 = Point::Model(ModelPoint::sphere(0.0, 1.0, 0.0).unwrap());
        let s = set(vec![q1, q0]);
        let (d, i) = distance_to_set(&space, &pole, &s).unwrap();
        assert_abs_diff_eq!(d, FRAC_PI_2, epsilon = 1e-12);
        assert_eq!(i, 0);
    }

    #[test]
    fn distance_to_set_stable_under_permutation() {
        let space = SpaceHandle::plane();
        let pts =
            vec![Point::plane(1.0, 1.0), Point::plane(-1.0, 1.0), Point::plane(0.0, 2.0)];
        let p = Point::plane(0.0, 0.0);
        let forward = distance_to_set(&space, &p, &set(pts.clone())).unwrap();
        let mut rev = pts;
        rev.reverse();
        let backward = distance_to_set(&space, &p, &set(rev)).unwrap();
        assert_eq!(forward.0, backward.0);
    }

    #[test]
    fn min_angle_head_on_and_perpendicular() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let head_on = min_angle_to_set(&space, &gamma, &set(vec![Point::plane(5.0, 0.0)]), 0.0, k(0.0), None)
            .unwrap();
        assert!(head_on.angle.abs() < 1e-6);
        let perp = min_angle_to_set(&space, &gamma, &set(vec![Point::plane(0.0, 3.0)]), 0.0, k(0.0), None)
            .unwrap();
        assert_abs_diff_eq!(perp.angle, FRAC_PI_2, epsilon = 1e-6);
    }

    #[test]
    fn min_angle_two_symmetric_feet() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let s = set(vec![Point::plane(1.0, 1.0), Point::plane(1.0, -1.0)]);
        let rep = min_angle_to_set(&space, &gamma, &s, 0.0, k(0.0), None).unwrap();
        // Planar oracle: atan2(1, 1) = pi/4 on both feet.
        assert_abs_diff_eq!(rep.angle, FRAC_PI_4, epsilon = 1e-6);
        assert_eq!(rep.feet.len(), 2);
    }

    #[test]
    fn min_angle_rejects_origin_in_set() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let s = set(vec![Point::plane(0.0, 0.0)]);
        assert!(matches!(
            min_angle_to_set(&space, &gamma, &s, 0.0, k(0.0), None),
            Err(GeometryError::OriginInsideSet { .. })
        ));
    }

    #[test]
    fn first_variation_head_on_plane() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let rep = first_variation_check(&space, &gamma, &set(vec![Point::plane(5.0, 0.0)]), k(0.0), &[], None)
            .unwrap();
        assert!((rep.limit_estimate + 1.0).abs() < 1e-10);
        assert!(rep.residual <= 1e-8, "residual {}", rep.residual);
        assert!(rep.upper_bound_ok);
    }

    #[test]
    fn first_variation_perpendicular_plane() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let rep = first_variation_check(&space, &gamma, &set(vec![Point::plane(0.0, 3.0)]), k(0.0), &[], None)
            .unwrap();
        assert_abs_diff_eq!(rep.angle_min, FRAC_PI_2, epsilon = 1e-6);
        assert!(rep.residual <= 1e-6, "residual {}", rep.residual);
    }

    #[test]
    fn first_variation_sphere_oracle() {
        // Oracle: d(gamma(t), q) = arccos(cos t cos 1 + sin t sin 1 cos alpha),
        // whose right-derivative at zero is -cos(alpha).
        let space = SpaceHandle::model(k(1.0));
        let gamma = sphere_ray(0.0, 1.0);
        let alpha = FRAC_PI_3;
        let origin = ModelPoint::origin(Chart::Sphere);
        let q = exp_map(&origin, alpha, 1.0, k(1.0)).unwrap();
        let rep = first_variation_check(&space, &gamma, &set(vec![Point::Model(q)]), k(0.0), &[], None)
            .unwrap();
        assert!((rep.limit_estimate + alpha.cos()).abs() < 1e-4, "limit {}", rep.limit_estimate);
        assert!(rep.residual <= 1e-4, "residual {}", rep.residual);
    }

    #[test]
    fn first_variation_two_feet_plane() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let s = set(vec![Point::plane(1.0, 1.0), Point::plane(1.0, -1.0)]);
        let rep = first_variation_check(&space, &gamma, &s, k(0.0), &[], None).unwrap();
        assert!((rep.limit_estimate + FRAC_PI_4.cos()).abs() < 1e-6);
        assert!(rep.residual <= 1e-6, "residual {}", rep.residual);
    }

    #[test]
    fn first_variation_rejects_bad_schedules() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let s = set(vec![Point::plane(5.0, 0.0)]);
        assert!(first_variation_check(&space, &gamma, &s, k(0.0), &[0.1, 0.1], None).is_err());
        assert!(first_variation_check(&space, &gamma, &s, k(0.0), &[2.0, 1.0], None).is_err());
    }

    #[test]
    fn quotients_are_one_lipschitz() {
        let space = SpaceHandle::plane();
        let gamma = plane_ray(1.0);
        let s = set(vec![Point::plane(1.0, 1.0), Point::plane(-2.0, 0.5)]);
        let rep = first_variation_check(&space, &gamma, &s, k(0.0), &[], None).unwrap();
        for &(_, q) in &rep.quotients {
            assert!(q.abs() <= 1.0 + 1e-9, "quotient {q} breaks the Lipschitz bound");
        }
    }

    #[test]
    fn model_space_self_comparison_is_equality() {
        // A model space compared against its own curvature: the inequality
        // is an identity in both directions.
        for kk in [0.0, 1.0, -1.0] {
            let space = SpaceHandle::model(k(kk));
            let region = Region {
                center: Point::Model(ModelPoint::origin(k(kk).chart())),
                radius: 0.4,
            };
            for dir in [BoundDirection::Above, BoundDirection::Below] {
                let rep = curvature_bound_test(&space, &region, k(kk), dir, 50, 7).unwrap();
                assert_eq!(rep.violations_found, 0, "k = {kk}, {dir:?}");
            }
        }
    }

    #[test]
    fn sphere_has_curvature_at_least_zero() {
        let space = SpaceHandle::model(k(1.0));
        let region = Region { center: Point::Model(ModelPoint::origin(Chart::Sphere)), radius: 0.5 };
        let rep = curvature_bound_test(&space, &region, k(0.0), BoundDirection::Below, 200, 11).unwrap();
        assert_eq!(rep.violations_found, 0);
        // And the flat comparison from above fails: spherical chords are shorter.
        let rep = curvature_bound_test(&space, &region, k(0.0), BoundDirection::Above, 200, 11).unwrap();
        assert!(rep.violations_found > 0);
    }

    #[test]
    fn taxicab_rectangle_triangle_defeats_upper_bounds() {
        let tri = rectangle_circuit_triangle(1.0).unwrap();
        let sides = tri.side_lengths().unwrap();
        assert_eq!((sides.a(), sides.b(), sides.c()), (2.0, 2.0, 2.0));
        let space = SpaceHandle::taxicab();
        for kk in [-1.0, 0.0, 1.0] {
            let v = check_triangle_curvature(&space, &tri, k(kk), BoundDirection::Above, 7).unwrap();
            assert!(!v.is_empty(), "k = {kk}: no witness against curvature <= k");
            // Witness pair straddling the top vertex is metrically collinear.
            assert!(v.iter().any(|w| w.space_distance > w.model_distance + 1e-6));
        }
    }

    #[test]
    fn taxicab_branching_triangle_defeats_lower_bounds() {
        let tri = branching_triangle(1.0).unwrap();
        let space = SpaceHandle::taxicab();
        for kk in [-1.0, 0.0, 1.0] {
            let v = check_triangle_curvature(&space, &tri, k(kk), BoundDirection::Below, 7).unwrap();
            assert!(!v.is_empty(), "k = {kk}: no witness against curvature >= k");
            // The stem makes distinct comparison points coincide in space.
            assert!(v.iter().any(|w| w.space_distance < 1e-9 && w.model_distance > 0.1));
        }
    }

    #[test]
    fn region_too_large_for_sphere_rejected() {
        let space = SpaceHandle::model(k(1.0));
        let region = Region { center: Point::Model(ModelPoint::origin(Chart::Sphere)), radius: 2.0 };
        assert!(matches!(
            curvature_bound_test(&space, &region, k(1.0), BoundDirection::Below, 10, 0),
            Err(GeometryError::SidesNotAdmissible { .. })
        ));
    }

    #[test]
    fn supplementary_sum_is_two_pi_at_a_bifurcation() {
        // The bifurcation configuration: both arms of the x-axis make angle
        // pi with the upward branch, so the adjacent angles sum to 2 pi.
        let space = SpaceHandle::taxicab();
        let line = SampledPath::from_points(
            space.clone(),
            (0..=64).map(|i| Point::taxicab(-1.0 + i as f64 / 32.0, 0.0)).collect(),
        )
        .unwrap();
        let sigma = SampledPath::from_points(
            space.clone(),
            (0..=32).map(|i| Point::taxicab(0.0, i as f64 / 32.0)).collect(),
        )
        .unwrap();
        let grid = GridSchedule::new(0.25, 0.5, 12, 32).unwrap();
        let rep = crate::angles::supplementary_angles_check(&space, &line, 1.0, &sigma, k(0.0), &grid)
            .unwrap();
        assert_abs_diff_eq!(rep.sum, 2.0 * PI, epsilon = 1e-6);
        assert!(rep.deviation_from_pi > 1.0);
    }
}
