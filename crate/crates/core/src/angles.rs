//! Numerical upper and lower angles between paths with a common origin.
//!
//! The upper angle is the limit, over shrinking scales, of the supremum of
//! k-comparison angles of the triangles `(origin, gamma(t), eta(s))`. The
//! estimator discretizes the scale with a geometric schedule of levels and,
//! within each level, a square grid of parameter values in `(0, eps]^2`.
//! Grid values are log-spaced over three decades: the suprema that
//! distinguish pathological spaces (the taxicab plane) live at extreme
//! `t/s` ratios that a linear grid can never reach.
//!
//! Angles are computed from measured distances only, never tangent data, so
//! caller-supplied paths need not be unit-speed; side lengths come from the
//! space's metric, not from the parameters.

use serde::Serialize;

use crate::comparison::{comparison_angle, TriangleSides, ANGLE_TOL};
use crate::error::{GeometryError, Result};
use crate::spaces::{Point, SampledPath, SpaceHandle};

/// Dynamic range of the log-spaced grid values within one level.
const LEVEL_SPAN: f64 = 1e-3;

/// Sides shorter than this carry no angle information and are skipped
/// (they arise on graph spaces when a parameter snaps onto the origin).
const MIN_SIDE: f64 = 1e-14;

/// Geometric schedule of shrinking grid levels for the limsup estimator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSchedule {
    eps0: f64,
    factor: f64,
    levels: u32,
    samples_per_level: u32,
}

impl GridSchedule {
    pub fn new(eps0: f64, factor: f64, levels: u32, samples_per_level: u32) -> Result<Self> {
        if !(eps0.is_finite() && eps0 > 0.0) {
            return Err(GeometryError::InvalidSchedule(format!("eps0 = {eps0} must be positive")));
        }
        if !(factor > 0.0 && factor < 1.0) {
            return Err(GeometryError::InvalidSchedule(format!("factor = {factor} must lie in (0, 1)")));
        }
        if levels < 2 {
            return Err(GeometryError::InvalidSchedule(format!("levels = {levels} must be at least 2")));
        }
        if samples_per_level < 2 {
            return Err(GeometryError::InvalidSchedule(format!(
                "samples_per_level = {samples_per_level} must be at least 2"
            )));
        }
        Ok(GridSchedule { eps0, factor, levels, samples_per_level })
    }

    /// Default schedule for a pair of paths: `eps0` is a quarter of the
    /// shorter length, capped by both parameter domains; factor 1/2,
    /// 12 levels, 32 samples per level.
    pub fn default_for(gamma: &SampledPath, eta: &SampledPath) -> Result<Self> {
        let eps0 = (gamma.length().min(eta.length()) / 4.0)
            .min(gamma.domain_length())
            .min(eta.domain_length());
        GridSchedule::new(eps0, 0.5, 12, 32)
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn samples_per_level(&self) -> u32 {
        self.samples_per_level
    }

    /// Scale of level `j`.
    pub fn level_eps(&self, j: u32) -> f64 {
        self.eps0 * self.factor.powi(j as i32)
    }

    /// Log-spaced grid values in `(0, eps_j]`, ascending.
    pub fn level_values(&self, j: u32) -> Vec<f64> {
        let eps = self.level_eps(j);
        let n = self.samples_per_level;
        let rho = LEVEL_SPAN.powf(1.0 / (n - 1) as f64);
        (0..n).map(|i| eps * rho.powi((n - 1 - i) as i32)).collect()
    }

    /// The level scales themselves, ascending: the natural abscissa for
    /// monotonicity scans.
    pub fn level_scales_ascending(&self) -> Vec<f64> {
        (0..self.levels).rev().map(|j| self.level_eps(j)).collect()
    }
}

/// Per-level supremum and infimum of grid comparison angles.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelStats {
    pub eps: f64,
    pub sup: f64,
    pub inf: f64,
}

/// Result of the upper/lower angle estimator.
#[derive(Debug, Clone, Serialize)]
pub struct AngleEstimate {
    /// Grid supremum at the finest level.
    pub upper: f64,
    /// Grid infimum at the finest level.
    pub lower: f64,
    /// Raw per-level statistics, coarsest first.
    pub per_level: Vec<LevelStats>,
    pub k_used: f64,
    /// Self-reported bound: final-level gap plus the comparison-angle tolerance.
    pub error_bound: f64,
}

impl AngleEstimate {
    /// Bracket width at the finest level.
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Checks that two paths share an origin within the space's snap tolerance.
fn check_common_origin(space: &SpaceHandle, gamma: &SampledPath, eta: &SampledPath) -> Result<Point> {
    let sep = space.distance(gamma.origin(), eta.origin())?;
    let tol = 2.0 * space.certified_error() + 1e-9;
    if sep > tol {
        return Err(GeometryError::OriginMismatch { separation: sep, tolerance: tol });
    }
    Ok(*gamma.origin())
}

fn check_domains(grid: &GridSchedule, paths: &[&SampledPath]) -> Result<()> {
    for p in paths {
        if grid.eps0() > p.domain_length() * (1.0 + 1e-12) {
            return Err(GeometryError::InvalidSchedule(format!(
                "eps0 = {} exceeds a path domain of length {}",
                grid.eps0(),
                p.domain_length()
            )));
        }
    }
    Ok(())
}

/// Comparison angle at the shared origin for parameters `(t, s)` along the
/// two paths, from measured distances.
pub fn angle_at(
    space: &SpaceHandle,
    gamma: &SampledPath,
    eta: &SampledPath,
    k: crate::model::Curvature,
    t: f64,
    s: f64,
) -> Result<f64> {
    let origin = check_common_origin(space, gamma, eta)?;
    let (_, gp) = gamma.point_at(gamma.domain().0 + t)?;
    let (_, ep) = eta.point_at(eta.domain().0 + s)?;
    let a = space.distance(&origin, &gp)?;
    let b = space.distance(&origin, &ep)?;
    let c = space.distance(&gp, &ep)?;
    comparison_angle(&TriangleSides::new(a, b, c)?, k)
}

/// Estimates the upper and lower angle between `gamma` and `eta` at their
/// common origin, using k-comparison triangles over the grid schedule.
pub fn estimate_angles(
    space: &SpaceHandle,
    gamma: &SampledPath,
    eta: &SampledPath,
    k: crate::model::Curvature,
    grid: &GridSchedule,
) -> Result<AngleEstimate> {
    let origin = check_common_origin(space, gamma, eta)?;
    check_domains(grid, &[gamma, eta])?;

    let (g0, _) = gamma.domain();
    let (e0, _) = eta.domain();
    let mut per_level = Vec::with_capacity(grid.levels() as usize);

    for j in 0..grid.levels() {
        let values = grid.level_values(j);
        let mut gamma_pts = Vec::with_capacity(values.len());
        let mut eta_pts = Vec::with_capacity(values.len());
        for &v in &values {
            let (_, gp) = gamma.point_at(g0 + v)?;
            let (_, ep) = eta.point_at(e0 + v)?;
            gamma_pts.push((space.distance(&origin, &gp)?, gp));
            eta_pts.push((space.distance(&origin, &ep)?, ep));
        }
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        for (a, gp) in &gamma_pts {
            if *a < MIN_SIDE {
                continue;
            }
            for (b, ep) in &eta_pts {
                if *b < MIN_SIDE {
                    continue;
                }
                let c = space.distance(gp, ep)?;
                let theta = comparison_angle(&TriangleSides::new(*a, *b, c)?, k)?;
                sup = sup.max(theta);
                inf = inf.min(theta);
            }
        }
        if sup.is_finite() {
            per_level.push(LevelStats { eps: grid.level_eps(j), sup, inf });
        }
    }

    let last = per_level
        .last()
        .copied()
        .ok_or_else(|| GeometryError::DegeneratePath("no usable grid pairs near the origin".into()))?;
    Ok(AngleEstimate {
        upper: last.sup,
        lower: last.inf,
        per_level,
        k_used: k.k(),
        error_bound: (last.sup - last.inf) + ANGLE_TOL,
    })
}

/// Which side of the comparison inequality a space is declared to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// Curvature at most `k`: comparison angles grow with scale.
    Above,
    /// Curvature at least `k`: comparison angles shrink with scale.
    Below,
}

/// Result of a monotonicity scan of `t -> angle(t, s0)`.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub s0: f64,
    /// `(t, angle)` pairs, ascending in `t` (the level scales).
    pub points: Vec<(f64, f64)>,
    pub direction: BoundDirection,
    /// Worst step against the expected direction; zero when perfectly monotone.
    pub worst_violation: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Verifies that `t -> angle(gamma(t), eta(s0))` is monotone in the
/// direction dictated by the declared curvature bound, sampling `t` along
/// the schedule's level scales.
pub fn monotonicity_check(
    space: &SpaceHandle,
    gamma: &SampledPath,
    eta: &SampledPath,
    k: crate::model::Curvature,
    s0: Option<f64>,
    direction: BoundDirection,
    grid: &GridSchedule,
) -> Result<MonotonicityReport> {
    check_domains(grid, &[gamma, eta])?;
    let s0 = s0.unwrap_or_else(|| grid.eps0());
    let slack = 1e-9 + 2.0 * space.certified_error();
    let mut points = Vec::new();
    for t in grid.level_scales_ascending() {
        points.push((t, angle_at(space, gamma, eta, k, t, s0)?));
    }
    let mut worst: f64 = 0.0;
    for w in points.windows(2) {
        let step = w[1].1 - w[0].1; // t ascending
        let against = match direction {
            BoundDirection::Above => -step, // expected nondecreasing
            BoundDirection::Below => step,  // expected nonincreasing
        };
        worst = worst.max(against);
    }
    Ok(MonotonicityReport { s0, points, direction, worst_violation: worst, slack, pass: worst <= slack })
}

/// Result of the triangle-inequality check for upper angles.
#[derive(Debug, Clone, Serialize)]
pub struct TriangleInequalityReport {
    pub gamma_eta: f64,
    pub gamma_sigma: f64,
    pub sigma_eta: f64,
    /// `gamma_sigma + sigma_eta - gamma_eta`; nonnegative up to tolerance.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks the triangle inequality for upper angles of three paths sharing
/// an origin: `angle(gamma, eta) <= angle(gamma, sigma) + angle(sigma, eta)`.
pub fn angle_triangle_inequality_check(
    space: &SpaceHandle,
    gamma: &SampledPath,
    eta: &SampledPath,
    sigma: &SampledPath,
    k: crate::model::Curvature,
    grid: &GridSchedule,
) -> Result<TriangleInequalityReport> {
    check_common_origin(space, gamma, sigma)?;
    check_common_origin(space, sigma, eta)?;
    let ge = estimate_angles(space, gamma, eta, k, grid)?;
    let gs = estimate_angles(space, gamma, sigma, k, grid)?;
    let se = estimate_angles(space, sigma, eta, k, grid)?;
    let margin = gs.upper + se.upper - ge.upper;
    let tolerance = ge.error_bound + gs.error_bound + se.error_bound + 1e-9;
    Ok(TriangleInequalityReport {
        gamma_eta: ge.upper,
        gamma_sigma: gs.upper,
        sigma_eta: se.upper,
        margin,
        tolerance,
        pass: margin >= -tolerance,
    })
}

/// Result of the adjacent-angle check along a path.
#[derive(Debug, Clone, Serialize)]
pub struct SupplementaryReport {
    pub forward_angle: f64,
    pub backward_angle: f64,
    pub sum: f64,
    pub deviation_from_pi: f64,
    pub error_bound: f64,
}

/// Estimates the two angles `sigma` makes with the forward and backward
/// arms of `gamma` at the interior parameter `t_mid`, and reports how far
/// their sum sits from `pi`. In spaces with curvature bounded below the sum
/// is `pi`; bifurcating geodesics break it.
///
/// The grid's `eps0` is clamped to the shortest of the three arm domains.
pub fn supplementary_angles_check(
    space: &SpaceHandle,
    gamma: &SampledPath,
    t_mid: f64,
    sigma: &SampledPath,
    k: crate::model::Curvature,
    grid: &GridSchedule,
) -> Result<SupplementaryReport> {
    let (t0, t1) = gamma.domain();
    let interior = 1e-12 * (1.0 + t1 - t0);
    if !(t_mid > t0 + interior && t_mid < t1 - interior) {
        return Err(GeometryError::OutOfRange { what: "t_mid", value: t_mid, min: t0, max: t1 });
    }
    let forward = gamma.restrict_forward(t_mid)?;
    let backward = gamma.restrict_backward(t_mid)?;
    let eps0 = grid
        .eps0()
        .min(forward.domain_length())
        .min(backward.domain_length())
        .min(sigma.domain_length());
    let grid = GridSchedule::new(eps0, grid.factor(), grid.levels(), grid.samples_per_level())?;
    let fwd = estimate_angles(space, &forward, sigma, k, &grid)?;
    let bwd = estimate_angles(space, &backward, sigma, k, &grid)?;
    let sum = fwd.upper + bwd.upper;
    Ok(SupplementaryReport {
        forward_angle: fwd.upper,
        backward_angle: bwd.upper,
        sum,
        deviation_from_pi: (sum - std::f64::consts::PI).abs(),
        error_bound: fwd.error_bound + bwd.error_bound,
    })
}

/// Result of estimating the same pair of angles in several curvatures.
#[derive(Debug, Clone, Serialize)]
pub struct KIndependenceReport {
    /// `(k, upper, lower)` per requested curvature.
    pub estimates: Vec<(f64, f64, f64)>,
    pub upper_spread: f64,
    pub lower_spread: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Verifies that upper and lower angle estimates do not depend on the
/// comparison curvature: the pairwise spread across `k_list` stays within
/// `tolerance` at the finest level.
pub fn k_independence_check(
    space: &SpaceHandle,
    gamma: &SampledPath,
    eta: &SampledPath,
    grid: &GridSchedule,
    k_list: &[f64],
    tolerance: f64,
) -> Result<KIndependenceReport> {
    if k_list.is_empty() {
        return Err(GeometryError::InvalidSchedule("k_list is empty".into()));
    }
    let mut estimates = Vec::with_capacity(k_list.len());
    for &kk in k_list {
        let k = crate::model::Curvature::new(kk)?;
        let est = estimate_angles(space, gamma, eta, k, grid)?;
        estimates.push((kk, est.upper, est.lower));
    }
    let spread = |pick: fn(&(f64, f64, f64)) -> f64| {
        let lo = estimates.iter().map(pick).fold(f64::INFINITY, f64::min);
        let hi = estimates.iter().map(pick).fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let upper_spread = spread(|e| e.1);
    let lower_spread = spread(|e| e.2);
    Ok(KIndependenceReport {
        estimates,
        upper_spread,
        lower_spread,
        tolerance,
        pass: upper_spread <= tolerance && lower_spread <= tolerance,
    })
}

/// Result of the diagonal-limit diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct DiagonalLimitReport {
    /// `(eps, sup, inf)` of the sampled function per level.
    pub per_level: Vec<LevelStats>,
    pub final_gap: f64,
    pub gap_tolerance: f64,
    /// Whether the per-level gap shrank to within tolerance.
    pub converged: bool,
}

/// Samples `f` on the shrinking grid schedule toward `0+` and verifies that
/// the per-level `sup - inf` gap vanishes, which is what licenses replacing
/// the double limit by a diagonal one for component-wise monotone functions.
/// Purely diagnostic: non-monotone functions fail by design.
pub fn diagonal_limit_check<F: Fn(f64, f64) -> f64>(
    f: F,
    grid: &GridSchedule,
    gap_tolerance: f64,
) -> DiagonalLimitReport {
    let mut per_level = Vec::with_capacity(grid.levels() as usize);
    for j in 0..grid.levels() {
        let values = grid.level_values(j);
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        for &x in &values {
            for &y in &values {
                let v = f(x, y);
                sup = sup.max(v);
                inf = inf.min(v);
            }
        }
        per_level.push(LevelStats { eps: grid.level_eps(j), sup, inf });
    }
    let final_gap = per_level.last().map(|l| l.sup - l.inf).unwrap_or(f64::INFINITY);
    DiagonalLimitReport { per_level, final_gap, gap_tolerance, converged: final_gap <= gap_tolerance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Curvature, ModelPoint};
    use crate::spaces::Point;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    fn plane_ray(azimuth: f64, length: f64) -> SampledPath {
        let space = SpaceHandle::plane();
        let origin = Point::Model(ModelPoint::origin(crate::model::Chart::Plane));
        let tip = Point::plane(length * azimuth.cos(), length * azimuth.sin());
        space.shortest_path(&origin, &tip, length / 64.0).unwrap()
    }

    fn meridian(kk: f64, azimuth: f64, length: f64) -> SampledPath {
        let k = k(kk);
        let space = SpaceHandle::model(k);
        let origin = ModelPoint::origin(k.chart());
        let tip = crate::model::exp_map(&origin, azimuth, length, k).unwrap();
        space
            .shortest_path(&Point::Model(origin), &Point::Model(tip), length / 64.0)
            .unwrap()
    }

    fn taxicab_diag(extent: f64) -> SampledPath {
        let pts: Vec<Point> = (0..=64)
            .map(|i| {
                let t = extent * i as f64 / 64.0;
                Point::taxicab(t, t)
            })
            .collect();
        let samples = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (extent * i as f64 / 64.0, *p))
            .collect();
        SampledPath::new(SpaceHandle::taxicab(), samples).unwrap()
    }

    fn taxicab_axis(extent: f64) -> SampledPath {
        SampledPath::from_points(
            SpaceHandle::taxicab(),
            (0..=64).map(|i| Point::taxicab(extent * i as f64 / 64.0, 0.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn perpendicular_plane_rays() {
        let g = plane_ray(0.0, 1.0);
        let e = plane_ray(FRAC_PI_2, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let est = estimate_angles(&SpaceHandle::plane(), &g, &e, k(0.0), &grid).unwrap();
        assert_abs_diff_eq!(est.upper, FRAC_PI_2, epsilon = 1e-6);
        assert_abs_diff_eq!(est.lower, FRAC_PI_2, epsilon = 1e-6);
        assert!(est.lower <= est.upper + 1e-12);
    }

    #[test]
    fn identical_paths_have_zero_angle() {
        // Degenerate triangles turn f64 rounding in the measured sides into
        // O(sqrt(eps / side)) angle noise, so the bound is loose.
        let g = plane_ray(0.3, 1.0);
        let grid = GridSchedule::default_for(&g, &g).unwrap();
        let est = estimate_angles(&SpaceHandle::plane(), &g, &g, k(0.0), &grid).unwrap();
        assert!(est.upper.abs() < 1e-4, "upper = {:e}", est.upper);
        assert!(est.lower.abs() < 1e-4);
    }

    #[test]
    fn taxicab_counterexample_splits_upper_and_lower() {
        let g = taxicab_diag(1.0);
        let e = taxicab_axis(1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let est = estimate_angles(&SpaceHandle::taxicab(), &g, &e, k(0.0), &grid).unwrap();
        assert!(est.lower <= 1e-3, "lower = {}", est.lower);
        assert!(est.upper >= FRAC_PI_2 - 1e-2, "upper = {}", est.upper);
        assert!(est.upper <= FRAC_PI_2 + 1e-2, "upper = {}", est.upper);
        // The bracket never closes: the angle does not exist in this space.
        for l in &est.per_level {
            assert!(l.sup - l.inf > 1.0);
        }
    }

    #[test]
    fn model_ray_pairs_reproduce_vertex_angle() {
        for (kk, alpha) in [(0.0, FRAC_PI_3), (1.0, 1.0), (-1.0, 2.0)] {
            let g = meridian(kk, 0.0, 1.0);
            let e = meridian(kk, alpha, 1.0);
            let grid = GridSchedule::default_for(&g, &e).unwrap();
            let est = estimate_angles(&SpaceHandle::model(k(kk)), &g, &e, k(0.0), &grid).unwrap();
            assert_abs_diff_eq!(est.upper, alpha, epsilon = 1e-6);
            assert_abs_diff_eq!(est.lower, alpha, epsilon = 1e-6);
        }
    }

    #[test]
    fn mismatched_origins_rejected() {
        let g = plane_ray(0.0, 1.0);
        let shifted = SampledPath::from_points(
            SpaceHandle::plane(),
            vec![Point::plane(0.5, 0.5), Point::plane(1.5, 0.5)],
        )
        .unwrap();
        let grid = GridSchedule::default_for(&g, &shifted).unwrap();
        assert!(matches!(
            estimate_angles(&SpaceHandle::plane(), &g, &shifted, k(0.0), &grid),
            Err(GeometryError::OriginMismatch { .. })
        ));
    }

    #[test]
    fn schedule_must_fit_the_domains() {
        let g = plane_ray(0.0, 1.0);
        let e = plane_ray(1.0, 1.0);
        let grid = GridSchedule::new(5.0, 0.5, 4, 4).unwrap();
        assert!(matches!(
            estimate_angles(&SpaceHandle::plane(), &g, &e, k(0.0), &grid),
            Err(GeometryError::InvalidSchedule(_))
        ));
    }

    #[test]
    fn sphere_monotone_nonincreasing_against_flat_comparison() {
        // Curvature >= 0, compared in k = 0: angles shrink as t grows.
        let g = meridian(1.0, 0.0, 1.0);
        let e = meridian(1.0, 1.0, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep = monotonicity_check(
            &SpaceHandle::model(k(1.0)),
            &g,
            &e,
            k(0.0),
            None,
            BoundDirection::Below,
            &grid,
        )
        .unwrap();
        assert!(rep.pass, "worst violation {}", rep.worst_violation);

        // Cross-check sampled angles against the spherical law of cosines.
        let s0 = rep.s0;
        for &(t, angle) in &rep.points {
            let d = (t.cos() * s0.cos() + t.sin() * s0.sin() * 1.0f64.cos()).acos();
            let oracle =
                comparison_angle(&TriangleSides::new(t, s0, d).unwrap(), k(0.0)).unwrap();
            assert_abs_diff_eq!(angle, oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn hyperbolic_monotone_nondecreasing_against_flat_comparison() {
        let g = meridian(-1.0, 0.0, 1.0);
        let e = meridian(-1.0, 1.0, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep = monotonicity_check(
            &SpaceHandle::model(k(-1.0)),
            &g,
            &e,
            k(0.0),
            None,
            BoundDirection::Above,
            &grid,
        )
        .unwrap();
        assert!(rep.pass, "worst violation {}", rep.worst_violation);

        // Cross-check against the hyperbolic law of cosines.
        let s0 = rep.s0;
        for &(t, angle) in &rep.points {
            let d = (t.cosh() * s0.cosh() - t.sinh() * s0.sinh() * 1.0f64.cos()).acosh();
            let oracle =
                comparison_angle(&TriangleSides::new(t, s0, d).unwrap(), k(0.0)).unwrap();
            assert_abs_diff_eq!(angle, oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn plane_monotonicity_is_trivial() {
        let g = plane_ray(0.0, 1.0);
        let e = plane_ray(1.0, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        for dir in [BoundDirection::Above, BoundDirection::Below] {
            let rep = monotonicity_check(&SpaceHandle::plane(), &g, &e, k(0.0), None, dir, &grid).unwrap();
            assert!(rep.pass);
            assert!(rep.worst_violation <= 1e-12);
        }
    }

    #[test]
    fn per_level_stats_move_with_the_curvature_bound() {
        // Raw level stats drift monotonically toward the limit, from the
        // side the bound dictates.
        let g = meridian(1.0, 0.0, 1.0);
        let e = meridian(1.0, 1.0, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let est = estimate_angles(&SpaceHandle::model(k(1.0)), &g, &e, k(0.0), &grid).unwrap();
        for w in est.per_level.windows(2) {
            assert!(w[1].sup >= w[0].sup - 1e-9, "sphere sup must rise toward the angle");
            assert!(w[1].inf >= w[0].inf - 1e-9);
        }
        let g = meridian(-1.0, 0.0, 1.0);
        let e = meridian(-1.0, 1.0, 1.0);
        let est = estimate_angles(&SpaceHandle::model(k(-1.0)), &g, &e, k(0.0), &grid).unwrap();
        for w in est.per_level.windows(2) {
            assert!(w[1].sup <= w[0].sup + 1e-9, "hyperbolic sup must fall toward the angle");
            assert!(w[1].inf <= w[0].inf + 1e-9);
        }
    }

    #[test]
    fn strong_angle_bound_holds_on_analytic_cases() {
        // For fixed s, limsup over t -> 0 of the comparison angle stays
        // below the upper angle plus the reported error. Only the smallest
        // grid values witness the limit; at larger t the angle sits O(t)
        // away from it.
        for kk in [0.0, 1.0, -1.0] {
            let g = meridian(kk, 0.0, 1.0);
            let e = meridian(kk, 1.0, 1.0);
            let grid = GridSchedule::default_for(&g, &e).unwrap();
            let est = estimate_angles(&SpaceHandle::model(k(kk)), &g, &e, k(0.0), &grid).unwrap();
            let s = 0.5;
            let sup_t = grid
                .level_values(grid.levels() - 1)
                .iter()
                .take(8)
                .map(|&t| angle_at(&SpaceHandle::model(k(kk)), &g, &e, k(0.0), t, s).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                sup_t <= est.upper + est.error_bound + 1e-6,
                "k={kk}: {sup_t} vs {} + {}",
                est.upper,
                est.error_bound
            );
        }
    }

    #[test]
    fn triangle_inequality_additive_on_plane() {
        let g = plane_ray(0.0, 1.0);
        let s = plane_ray(30f64.to_radians(), 1.0);
        let e = plane_ray(70f64.to_radians(), 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep =
            angle_triangle_inequality_check(&SpaceHandle::plane(), &g, &e, &s, k(0.0), &grid).unwrap();
        assert!(rep.pass);
        assert!(rep.margin.abs() <= 1e-6, "planar additivity: margin {}", rep.margin);
    }

    #[test]
    fn triangle_inequality_reflexive_case() {
        let g = plane_ray(0.0, 1.0);
        let e = plane_ray(1.2, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep =
            angle_triangle_inequality_check(&SpaceHandle::plane(), &g, &e, &g, k(0.0), &grid).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn sphere_meridians_add_azimuths() {
        let g = meridian(1.0, 0.0, 1.0);
        let s = meridian(1.0, 0.5, 1.0);
        let e = meridian(1.0, 1.2, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep = angle_triangle_inequality_check(&SpaceHandle::model(k(1.0)), &g, &e, &s, k(0.0), &grid)
            .unwrap();
        assert!(rep.pass);
        assert!(rep.margin.abs() <= 1e-5, "azimuth additivity: margin {}", rep.margin);
    }

    #[test]
    fn supplementary_angles_on_the_plane() {
        let line = SampledPath::from_points(
            SpaceHandle::plane(),
            (0..=64).map(|i| Point::plane(-1.0 + i as f64 / 32.0, 0.0)).collect(),
        )
        .unwrap();
        let sigma = plane_ray(FRAC_PI_3, 1.0);
        let grid = GridSchedule::new(0.25, 0.5, 12, 32).unwrap();
        let rep =
            supplementary_angles_check(&SpaceHandle::plane(), &line, 1.0, &sigma, k(0.0), &grid).unwrap();
        assert_abs_diff_eq!(rep.forward_angle, FRAC_PI_3, epsilon = 1e-6);
        assert_abs_diff_eq!(rep.backward_angle, PI - FRAC_PI_3, epsilon = 1e-6);
        assert!(rep.deviation_from_pi <= 1e-6);
    }

    #[test]
    fn supplementary_rejects_endpoint_split() {
        let line = SampledPath::from_points(
            SpaceHandle::plane(),
            vec![Point::plane(-1.0, 0.0), Point::plane(1.0, 0.0)],
        )
        .unwrap();
        let sigma = plane_ray(1.0, 1.0);
        let grid = GridSchedule::new(0.25, 0.5, 4, 8).unwrap();
        assert!(
            supplementary_angles_check(&SpaceHandle::plane(), &line, 0.0, &sigma, k(0.0), &grid).is_err()
        );
    }

    #[test]
    fn k_independence_on_plane_rays() {
        let g = plane_ray(0.0, 1.0);
        let e = plane_ray(FRAC_PI_3, 1.0);
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep =
            k_independence_check(&SpaceHandle::plane(), &g, &e, &grid, &[-1.0, 0.0, 1.0], 1e-6).unwrap();
        assert!(rep.pass, "spreads {} / {}", rep.upper_spread, rep.lower_spread);
    }

    #[test]
    fn k_independence_identical_paths() {
        let g = plane_ray(0.7, 1.0);
        let grid = GridSchedule::default_for(&g, &g).unwrap();
        let rep =
            k_independence_check(&SpaceHandle::plane(), &g, &g, &grid, &[-1.0, 0.0, 1.0], 1e-4).unwrap();
        assert!(rep.pass);
        for (_, upper, lower) in rep.estimates {
            assert!(upper.abs() < 1e-4 && lower.abs() < 1e-4);
        }
    }

    #[test]
    fn diagonal_limit_converges_for_monotone_function() {
        let grid = GridSchedule::new(0.25, 0.5, 10, 16).unwrap();
        let rep = diagonal_limit_check(|x, y| x + y, &grid, 1e-3);
        assert!(rep.converged, "final gap {}", rep.final_gap);
        for w in rep.per_level.windows(2) {
            assert!(w[1].sup - w[1].inf <= w[0].sup - w[0].inf + 1e-12);
        }
    }

    #[test]
    fn diagonal_limit_fails_for_ratio_function() {
        // min/max is not component-wise monotone; the gap never closes.
        let grid = GridSchedule::new(0.25, 0.5, 10, 16).unwrap();
        let rep = diagonal_limit_check(|x, y| x.min(y) / x.max(y), &grid, 1e-3);
        assert!(!rep.converged);
        assert!(rep.final_gap > 0.9);
    }

    #[test]
    fn diagonal_limit_on_sphere_angle_grid() {
        let g = meridian(1.0, 0.0, 1.0);
        let e = meridian(1.0, 1.0, 1.0);
        let space = SpaceHandle::model(k(1.0));
        let grid = GridSchedule::default_for(&g, &e).unwrap();
        let rep = diagonal_limit_check(
            |t, s| angle_at(&space, &g, &e, k(0.0), t, s).unwrap(),
            &grid,
            1e-3,
        );
        assert!(rep.converged, "final gap {}", rep.final_gap);
    }
}
