//! Comparison triangles: solve side lengths for the comparison angle in the
//! model surface of curvature `k`, embed the triangle canonically, and place
//! comparison points along its sides.
//!
//! The angle solvers use the half-angle forms of the Euclidean, spherical,
//! and hyperbolic laws of cosines,
//!
//! ```text
//! tan(theta/2) = sqrt( g(s-a) g(s-b) / ( g(s) g(s-c) ) ),  s = (a+b+c)/2
//! ```
//!
//! with `g = id`, `sin`, `sinh` respectively (sides pre-scaled by
//! `sqrt(|k|)`). These are algebraically identical to solving
//! `c^2 = a^2 + b^2 - 2ab cos(theta)` and its curved analogues, but remain
//! accurate for the long, thin triangles the angle estimators produce, where
//! the direct law-of-cosines rearrangement loses all significant digits.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::model::{exp_map, geodesic_point, model_distance, Curvature, ModelPoint};

/// Tolerance used when verifying that an embedded triangle realizes its side lengths.
pub const SIDE_REALIZATION_TOL: f64 = 1e-10;

/// Tolerance attached to comparison-angle values by downstream error budgets.
pub const ANGLE_TOL: f64 = 1e-9;

/// Relative slack allowed on the metric triangle inequality; measured
/// distances may overshoot by accumulated round-off.
const METRIC_SLACK: f64 = 1e-9;

const ZERO_SIDE_TOL: f64 = 1e-300;

/// Side lengths of a triangle: `a`, `b` adjacent to the vertex of interest,
/// `c` opposite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    a: f64,
    b: f64,
    c: f64,
}

/// Whether a perimeter satisfies the strict diameter bound or only the
/// realizability bound `perimeter < 2 D_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    /// `a + b + c < D_k`.
    Strict,
    /// `a + b + c` in `[D_k, 2 D_k)`: realizable, flagged for callers that
    /// want the stricter reading.
    Extended,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let all_finite = a.is_finite() && b.is_finite() && c.is_finite();
        let nonneg = a >= 0.0 && b >= 0.0 && c >= 0.0;
        let slack = METRIC_SLACK * (1.0 + a + b + c);
        let metric = a <= b + c + slack && b <= a + c + slack && c <= a + b + slack;
        if !(all_finite && nonneg && metric) {
            return Err(GeometryError::SidesNotMetric { a, b, c });
        }
        Ok(TriangleSides { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }

    /// Classifies the sides against the curvature's diameter bounds.
    ///
    /// Errors if the perimeter reaches `2 D_k`, the realizability limit of
    /// the model surface.
    pub fn admissibility_for(&self, k: Curvature) -> Result<Admissibility> {
        let d_k = k.diameter();
        let p = self.perimeter();
        if p >= 2.0 * d_k {
            return Err(GeometryError::SidesNotAdmissible { perimeter: p, k: k.k(), bound: 2.0 * d_k });
        }
        if p < d_k {
            Ok(Admissibility::Strict)
        } else {
            Ok(Admissibility::Extended)
        }
    }
}

/// Side identifiers of a comparison triangle with vertices `(x, y, z)`.
///
/// `Xy` runs from the first vertex to the second (length `a`), `Xz` from the
/// first to the third (length `b`), `Yz` from the second to the third
/// (length `c`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Xy,
    Xz,
    Yz,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Xy, Side::Xz, Side::Yz];
}

/// A triangle embedded in the model surface realizing prescribed side lengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonTriangle {
    k: Curvature,
    vertices: [ModelPoint; 3],
    sides: TriangleSides,
    admissibility: Admissibility,
}

impl ComparisonTriangle {
    pub fn k(&self) -> Curvature {
        self.k
    }

    pub fn vertices(&self) -> &[ModelPoint; 3] {
        &self.vertices
    }

    pub fn sides(&self) -> &TriangleSides {
        &self.sides
    }

    pub fn admissibility(&self) -> Admissibility {
        self.admissibility
    }

    pub fn side_length(&self, side: Side) -> f64 {
        match side {
            Side::Xy => self.sides.a,
            Side::Xz => self.sides.b,
            Side::Yz => self.sides.c,
        }
    }

    pub fn side_endpoints(&self, side: Side) -> (&ModelPoint, &ModelPoint) {
        match side {
            Side::Xy => (&self.vertices[0], &self.vertices[1]),
            Side::Xz => (&self.vertices[0], &self.vertices[2]),
            Side::Yz => (&self.vertices[1], &self.vertices[2]),
        }
    }
}

/// Scaled side function: identity, `sin`, or `sinh` depending on the
/// curvature sign. Negative arguments are clamped to zero; they only occur
/// through round-off on degenerate triangles.
fn side_fn(x: f64, k: Curvature) -> f64 {
    let x = x.max(0.0);
    if k.k() > 0.0 {
        (x * k.scale()).sin().max(0.0)
    } else if k.k() < 0.0 {
        (x * k.scale()).sinh()
    } else {
        x
    }
}

/// Interior angle of the comparison triangle at the vertex adjacent to
/// sides `a` and `b`.
pub fn comparison_angle(sides: &TriangleSides, k: Curvature) -> Result<f64> {
    if sides.a <= ZERO_SIDE_TOL || sides.b <= ZERO_SIDE_TOL {
        return Err(GeometryError::ZeroAdjacentSide { a: sides.a, b: sides.b });
    }
    sides.admissibility_for(k)?;
    let s = 0.5 * sides.perimeter();
    let num = side_fn(s - sides.a, k) * side_fn(s - sides.b, k);
    let den = side_fn(s, k) * side_fn(s - sides.c, k);
    Ok(2.0 * num.max(0.0).sqrt().atan2(den.max(0.0).sqrt()))
}

/// Embeds the sides as a triangle in the model surface: first vertex at the
/// chart origin, second along azimuth zero, third at azimuth equal to the
/// comparison angle. The canonical frame makes the output deterministic.
pub fn embed_triangle(sides: &TriangleSides, k: Curvature) -> Result<ComparisonTriangle> {
    let admissibility = sides.admissibility_for(k)?;
    let theta = comparison_angle(sides, k)?;
    let x = ModelPoint::origin(k.chart());
    let y = exp_map(&x, 0.0, sides.a, k)?;
    let z = exp_map(&x, theta, sides.b, k)?;
    debug_assert!({
        let c = model_distance(&y, &z, k)?;
        (c - sides.c).abs() <= SIDE_REALIZATION_TOL * (1.0 + sides.c)
    });
    Ok(ComparisonTriangle { k, vertices: [x, y, z], sides: *sides, admissibility })
}

/// Point at arc length `s` from the side's first vertex along that side.
pub fn comparison_point(tri: &ComparisonTriangle, side: Side, s: f64) -> Result<ModelPoint> {
    let len = tri.side_length(side);
    let tol = 1e-12 * (1.0 + len);
    if !(-tol..=len + tol).contains(&s) {
        return Err(GeometryError::OutOfRange { what: "side arc length", value: s, min: 0.0, max: len });
    }
    let (from, to) = tri.side_endpoints(side);
    if len == 0.0 {
        return Ok(*from);
    }
    geodesic_point(from, to, s.clamp(0.0, len), tri.k)
}

/// Residual `|cos(theta) - (s - d)/t|` for the thin-triangle configuration:
/// two geodesics from the chart origin separated by `alpha`, evaluated at
/// arc lengths `t` and `s`, with `theta` the k-comparison angle of the
/// measured side lengths. Tends to zero linearly in `t`.
pub fn thin_triangle_residual(k: Curvature, alpha: f64, s: f64, t: f64) -> Result<f64> {
    if t <= 0.0 || s <= 0.0 {
        return Err(GeometryError::OutOfRange { what: "arc length", value: t.min(s), min: 0.0, max: f64::INFINITY });
    }
    let origin = ModelPoint::origin(k.chart());
    let gamma_t = exp_map(&origin, 0.0, t, k)?;
    let eta_s = exp_map(&origin, alpha, s, k)?;
    let d = model_distance(&gamma_t, &eta_s, k)?;
    let theta = comparison_angle(&TriangleSides::new(t, s, d)?, k)?;
    Ok((theta.cos() - (s - d) / t).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    fn sides(a: f64, b: f64, c: f64) -> TriangleSides {
        TriangleSides::new(a, b, c).unwrap()
    }

    #[test]
    fn equilateral_flat() {
        assert_abs_diff_eq!(
            comparison_angle(&sides(1.0, 1.0, 1.0), k(0.0)).unwrap(),
            FRAC_PI_3,
            epsilon = 1e-15
        );
    }

    #[test]
    fn right_triangle_flat() {
        assert_abs_diff_eq!(
            comparison_angle(&sides(3.0, 4.0, 5.0), k(0.0)).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn spherical_octant() {
        assert_abs_diff_eq!(
            comparison_angle(&sides(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2), k(1.0)).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn degenerate_flat_triangle_is_straight() {
        for kk in [0.0, 1.0, -1.0] {
            let th = comparison_angle(&sides(0.4, 0.7, 1.1), k(kk)).unwrap();
            assert_abs_diff_eq!(th, PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn collinear_short_side_gives_zero() {
        for kk in [0.0, 1.0, -1.0] {
            let th = comparison_angle(&sides(0.9, 0.4, 0.5), k(kk)).unwrap();
            assert_abs_diff_eq!(th, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_adjacent_side_rejected() {
        assert!(matches!(
            comparison_angle(&sides(0.0, 1.0, 1.0), k(0.0)),
            Err(GeometryError::ZeroAdjacentSide { .. })
        ));
    }

    #[test]
    fn triangle_inequality_enforced() {
        assert!(TriangleSides::new(1.0, 1.0, 3.0).is_err());
        assert!(TriangleSides::new(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn perimeter_bound_enforced_for_positive_curvature() {
        // perimeter = 2.4 pi >= 2 pi = 2 D_1
        let s = sides(0.8 * PI, 0.8 * PI, 0.8 * PI);
        assert!(matches!(
            comparison_angle(&s, k(1.0)),
            Err(GeometryError::SidesNotAdmissible { .. })
        ));
        assert!(comparison_angle(&s, k(0.0)).is_ok());
    }

    #[test]
    fn extended_admissibility_flagged() {
        let s = sides(1.5, 1.5, 1.5); // perimeter 4.5 in [pi, 2 pi)
        assert_eq!(s.admissibility_for(k(1.0)).unwrap(), Admissibility::Extended);
        let t = sides(0.5, 0.5, 0.5);
        assert_eq!(t.admissibility_for(k(1.0)).unwrap(), Admissibility::Strict);
        assert_eq!(s.admissibility_for(k(-1.0)).unwrap(), Admissibility::Strict);
    }

    #[test]
    fn embed_345_realizes_sides() {
        let tri = embed_triangle(&sides(3.0, 4.0, 5.0), k(0.0)).unwrap();
        let [x, y, z] = tri.vertices();
        assert_abs_diff_eq!(model_distance(x, y, k(0.0)).unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model_distance(x, z, k(0.0)).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model_distance(y, z, k(0.0)).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn embed_unit_equilateral_on_sphere() {
        let tri = embed_triangle(&sides(1.0, 1.0, 1.0), k(1.0)).unwrap();
        let [x, y, z] = tri.vertices();
        for (p, q) in [(x, y), (x, z), (y, z)] {
            assert_abs_diff_eq!(model_distance(p, q, k(1.0)).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn embed_rejects_degenerate_side() {
        assert!(embed_triangle(&sides(0.0, 1.0, 1.0), k(0.0)).is_err());
    }

    #[test]
    fn comparison_point_endpoints_and_midpoint() {
        let tri = embed_triangle(&sides(3.0, 4.0, 5.0), k(0.0)).unwrap();
        let p0 = comparison_point(&tri, Side::Yz, 0.0).unwrap();
        assert_eq!(&p0, &tri.vertices()[1]);
        let p1 = comparison_point(&tri, Side::Yz, 5.0).unwrap();
        assert!(model_distance(&p1, &tri.vertices()[2], k(0.0)).unwrap() < 1e-10);
        let mid = comparison_point(&tri, Side::Yz, 2.5).unwrap();
        for v in [&tri.vertices()[1], &tri.vertices()[2]] {
            assert_abs_diff_eq!(model_distance(&mid, v, k(0.0)).unwrap(), 2.5, epsilon = 1e-12);
        }
        assert!(comparison_point(&tri, Side::Yz, 5.5).is_err());
    }

    #[test]
    fn angle_matches_vertex_measurement() {
        // Same triangle, two routes: solve the law of cosines vs measure
        // tangent directions on the embedded triangle.
        use crate::model::vertex_angle;
        for kk in [0.0, 1.0, -1.0, 0.3, -2.0] {
            let k = k(kk);
            let s = sides(0.6, 0.9, 1.2);
            let theta = comparison_angle(&s, k).unwrap();
            let tri = embed_triangle(&s, k).unwrap();
            let [x, y, z] = tri.vertices();
            let measured = vertex_angle(x, y, z, k).unwrap();
            assert_abs_diff_eq!(theta, measured, epsilon = 1e-9);
        }
    }

    #[test]
    fn monotone_in_opposite_side() {
        // The angle/distance equivalence: theta is nondecreasing in c.
        for kk in [0.0, 1.0, -1.0] {
            let k = k(kk);
            let mut last = -1.0;
            for i in 0..=40 {
                let c = 0.3 + 1.2 * i as f64 / 40.0;
                let th = comparison_angle(&sides(0.8, 0.7, c), k).unwrap();
                assert!(th >= last - 1e-12, "k={kk}, c={c}: {th} < {last}");
                last = th;
            }
        }
    }

    #[test]
    fn continuous_as_curvature_vanishes() {
        let s = sides(0.6, 0.9, 1.2);
        let flat = comparison_angle(&s, k(0.0)).unwrap();
        for kk in [1e-8, -1e-8, 1e-10, -1e-10] {
            let th = comparison_angle(&s, k(kk)).unwrap();
            assert!((th - flat).abs() <= 1e-6, "k={kk}: |{th} - {flat}|");
        }
    }

    #[test]
    fn thin_triangle_residual_decays_linearly() {
        for kk in [0.0, 1.0, -1.0] {
            let k = k(kk);
            let mut t = 1e-3;
            let mut prev = f64::INFINITY;
            for _ in 0..=8 {
                let r = thin_triangle_residual(k, FRAC_PI_3, 1.0, t).unwrap();
                assert!(r < 1e-2, "k={kk}, t={t}: residual {r}");
                assert!(r < prev, "k={kk}, t={t}: residual {r} did not decrease from {prev}");
                prev = r;
                t *= 0.5;
            }
        }
    }

    #[test]
    fn thin_triangle_residual_at_rate_bound() {
        // Observed empirical rate: residual at scale t stays below 10 t.
        for kk in [0.0, 1.0, -1.0] {
            for &t in &[1e-2, 1e-3, 1e-4] {
                let r = thin_triangle_residual(k(kk), FRAC_PI_2, 1.0, t).unwrap();
                assert!(r <= 10.0 * t, "k={kk}, t={t}: {r}");
            }
        }
    }
}
