//! Sampled curves in a metric space.

use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::spaces::{Point, SpaceHandle};

/// A curve represented by finitely many `(parameter, point)` samples with
/// strictly increasing parameters.
///
/// Paths produced by the shortest-path oracles are unit-speed (parameter
/// equals arc length); caller-supplied paths need not be, and the angle
/// machinery measures distances rather than trusting parameters.
#[derive(Debug, Clone)]
pub struct SampledPath {
    space: SpaceHandle,
    samples: Vec<(f64, Point)>,
    length: f64,
}

impl SampledPath {
    /// Wraps explicit samples. Parameters must strictly increase and
    /// consecutive points must be distinct.
    pub fn new(space: SpaceHandle, samples: Vec<(f64, Point)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(GeometryError::DegeneratePath("no samples".into()));
        }
        let mut length = 0.0;
        for i in 1..samples.len() {
            if !(samples[i].0 > samples[i - 1].0) {
                return Err(GeometryError::NonMonotoneParameters { index: i, value: samples[i].0 });
            }
            let d = space.distance(&samples[i - 1].1, &samples[i].1)?;
            if d == 0.0 {
                return Err(GeometryError::DegeneratePath(format!(
                    "consecutive samples {i} coincide"
                )));
            }
            length += d;
        }
        // Validate the first point too (distance checks only touch pairs).
        space.snap(&samples[0].1)?;
        Ok(SampledPath { space, samples, length })
    }

    /// Builds a path from points, assigning cumulative chord-length
    /// parameters (so the result is unit-speed at its sampling).
    pub fn from_points(space: SpaceHandle, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(GeometryError::DegeneratePath("no samples".into()));
        }
        let mut samples = Vec::with_capacity(points.len());
        let mut t = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                let d = space.distance(&points[i - 1], p)?;
                if d == 0.0 {
                    return Err(GeometryError::DegeneratePath(format!(
                        "consecutive samples {i} coincide"
                    )));
                }
                t += d;
            }
            samples.push((t, *p));
        }
        SampledPath::new(space, samples)
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn samples(&self) -> &[(f64, Point)] {
        &self.samples
    }

    pub fn origin(&self) -> &Point {
        &self.samples[0].1
    }

    pub fn endpoint(&self) -> &Point {
        &self.samples[self.samples.len() - 1].1
    }

    /// Parameter interval `[t0, t1]` the path is defined on.
    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    pub fn domain_length(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    /// Partition sum of consecutive sample distances: the path's length at
    /// its current sampling. Nondecreasing under sample refinement.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Whether parameter increments match chord lengths within `tol`.
    pub fn is_unit_speed(&self, tol: f64) -> bool {
        self.samples.windows(2).all(|w| {
            let d = self.space.distance(&w[0].1, &w[1].1).unwrap_or(f64::NAN);
            (w[1].0 - w[0].0 - d).abs() <= tol
        })
    }

    /// Re-indexes samples by cumulative chord length. Errors on
    /// zero-length paths. Idempotent on unit-speed paths.
    pub fn arc_length_reparam(&self) -> Result<SampledPath> {
        if self.length <= 0.0 {
            return Err(GeometryError::ZeroLengthPath);
        }
        let mut samples = Vec::with_capacity(self.samples.len());
        let mut t = 0.0;
        samples.push((0.0, self.samples[0].1));
        for w in self.samples.windows(2) {
            t += self.space.distance(&w[0].1, &w[1].1)?;
            samples.push((t, w[1].1));
        }
        SampledPath::new(self.space.clone(), samples)
    }

    /// Point at parameter `t`, interpolating between samples on analytic
    /// spaces. On graph kinds the nearest sample is used; the returned
    /// parameter is the one actually realized.
    pub fn point_at(&self, t: f64) -> Result<(f64, Point)> {
        let (t0, t1) = self.domain();
        let tol = 1e-12 * (1.0 + t1.abs().max(t0.abs()));
        if t < t0 - tol || t > t1 + tol {
            return Err(GeometryError::OutOfRange { what: "path parameter", value: t, min: t0, max: t1 });
        }
        let t = t.clamp(t0, t1);
        let idx = match self.samples.binary_search_by(|s| s.0.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.samples[i]),
            Err(i) => i,
        };
        // t lies strictly between samples idx-1 and idx.
        let (ta, pa) = self.samples[idx - 1];
        let (tb, pb) = self.samples[idx];
        match self.space {
            SpaceHandle::Graph(_) | SpaceHandle::CubeSurface { .. } => {
                if t - ta <= tb - t {
                    Ok((ta, pa))
                } else {
                    Ok((tb, pb))
                }
            }
            _ => {
                let d = self.space.distance(&pa, &pb)?;
                let f = (t - ta) / (tb - ta);
                let p = self.space.interpolate(&pa, &pb, f * d)?;
                Ok((t, p))
            }
        }
    }

    /// Ensures `t` is a sample parameter, inserting an interpolated sample
    /// on analytic spaces; on graph kinds returns the nearest existing
    /// parameter.
    fn materialize(&self, t: f64) -> Result<(SampledPath, f64)> {
        let (t_eff, p) = self.point_at(t)?;
        if self.samples.iter().any(|(s, _)| *s == t_eff) {
            return Ok((self.clone(), t_eff));
        }
        let mut samples = self.samples.clone();
        let pos = samples.partition_point(|(s, _)| *s < t_eff);
        samples.insert(pos, (t_eff, p));
        Ok((SampledPath::new(self.space.clone(), samples)?, t_eff))
    }

    /// The sub-path from `t_mid` forward to the end, re-anchored at
    /// parameter zero.
    pub fn restrict_forward(&self, t_mid: f64) -> Result<SampledPath> {
        let (path, t_eff) = self.materialize(t_mid)?;
        let samples: Vec<(f64, Point)> = path
            .samples
            .iter()
            .filter(|(s, _)| *s >= t_eff)
            .map(|(s, p)| (s - t_eff, *p))
            .collect();
        if samples.len() < 2 {
            return Err(GeometryError::DegeneratePath("restriction leaves a single sample".into()));
        }
        SampledPath::new(self.space.clone(), samples)
    }

    /// The sub-path running backward from `t_mid` to the start, re-anchored
    /// at parameter zero.
    pub fn restrict_backward(&self, t_mid: f64) -> Result<SampledPath> {
        let (path, t_eff) = self.materialize(t_mid)?;
        let samples: Vec<(f64, Point)> = path
            .samples
            .iter()
            .rev()
            .filter(|(s, _)| *s <= t_eff)
            .map(|(s, p)| (t_eff - s, *p))
            .collect();
        if samples.len() < 2 {
            return Err(GeometryError::DegeneratePath("restriction leaves a single sample".into()));
        }
        SampledPath::new(self.space.clone(), samples)
    }
}

/// Serialized form: the sample list only (spaces are not serialized).
impl Serialize for SampledPath {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.samples.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Curvature, ModelPoint};
    use approx::assert_abs_diff_eq;

    fn plane() -> SpaceHandle {
        SpaceHandle::plane()
    }

    #[test]
    fn two_sample_segment_length() {
        let p = SampledPath::from_points(plane(), vec![Point::plane(0.0, 0.0), Point::plane(1.0, 0.0)]).unwrap();
        assert_eq!(p.length(), 1.0);
        assert!(p.is_unit_speed(1e-12));
    }

    #[test]
    fn taxicab_diagonal_any_sampling_has_length_two() {
        let space = SpaceHandle::taxicab();
        for n in [1usize, 7, 100] {
            let pts: Vec<Point> = (0..=n)
                .map(|i| Point::taxicab(i as f64 / n as f64, i as f64 / n as f64))
                .collect();
            let path = SampledPath::from_points(space.clone(), pts).unwrap();
            assert_abs_diff_eq!(path.length(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_circle_length_converges_to_two_pi() {
        // Partition sums refine toward the supremum; freeze 2*pi once two
        // successive refinements agree below 1e-8.
        let space = plane();
        let circle = |n: usize| {
            let pts: Vec<Point> = (0..=n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    Point::plane(a.cos(), a.sin())
                })
                .collect();
            SampledPath::from_points(space.clone(), pts).unwrap().length()
        };
        assert_abs_diff_eq!(circle(10_000), std::f64::consts::TAU, epsilon = 1e-6);
        let mut n = 10_000;
        let mut prev = circle(n);
        loop {
            n *= 2;
            let next = circle(n);
            assert!(next >= prev - 1e-15, "refinement must not shrink the sum");
            if (next - prev).abs() < 1e-8 {
                prev = next;
                break;
            }
            prev = next;
            assert!(n <= 320_000, "refinement failed to settle");
        }
        assert_abs_diff_eq!(prev, std::f64::consts::TAU, epsilon = 1e-6);
    }

    #[test]
    fn reparam_is_idempotent_on_unit_speed() {
        let p = SampledPath::from_points(
            plane(),
            vec![Point::plane(0.0, 0.0), Point::plane(0.5, 0.0), Point::plane(0.5, 1.5)],
        )
        .unwrap();
        let q = p.arc_length_reparam().unwrap();
        for (a, b) in p.samples().iter().zip(q.samples()) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn reparam_fixes_uniform_semicircle() {
        let pts: Vec<Point> = (0..=64)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 64.0;
                Point::plane(a.cos(), a.sin())
            })
            .collect();
        // Uniform angle parameters are not arc length; reparam restores
        // the unit-speed invariant.
        let raw = SampledPath::new(
            plane(),
            pts.iter().enumerate().map(|(i, p)| (i as f64 * 2.0, *p)).collect(),
        )
        .unwrap();
        assert!(!raw.is_unit_speed(1e-6));
        let fixed = raw.arc_length_reparam().unwrap();
        assert!(fixed.is_unit_speed(1e-12));
    }

    #[test]
    fn degenerate_paths_rejected() {
        let space = plane();
        assert!(SampledPath::from_points(space.clone(), vec![]).is_err());
        assert!(SampledPath::from_points(
            space.clone(),
            vec![Point::plane(1.0, 1.0), Point::plane(1.0, 1.0)]
        )
        .is_err());
        let single = SampledPath::from_points(space, vec![Point::plane(1.0, 1.0)]).unwrap();
        assert!(matches!(single.arc_length_reparam(), Err(GeometryError::ZeroLengthPath)));
    }

    #[test]
    fn point_at_interpolates_on_the_sphere() {
        let k = Curvature::new(1.0).unwrap();
        let space = SpaceHandle::model(k);
        let a = Point::Model(ModelPoint::sphere(0.0, 0.0, 1.0).unwrap());
        let b = Point::Model(ModelPoint::sphere(1.0, 0.0, 0.0).unwrap());
        let path = space.shortest_path(&a, &b, 0.1).unwrap();
        let (t, p) = path.point_at(0.5).unwrap();
        assert_eq!(t, 0.5);
        assert_abs_diff_eq!(space.distance(&a, &p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn restriction_splits_at_interior_parameter() {
        let path = SampledPath::from_points(
            plane(),
            vec![Point::plane(-1.0, 0.0), Point::plane(1.0, 0.0)],
        )
        .unwrap();
        let fwd = path.restrict_forward(1.0).unwrap();
        let bwd = path.restrict_backward(1.0).unwrap();
        assert_eq!(*fwd.origin(), Point::plane(0.0, 0.0));
        assert_eq!(*bwd.origin(), Point::plane(0.0, 0.0));
        assert_eq!(*fwd.endpoint(), Point::plane(1.0, 0.0));
        assert_eq!(*bwd.endpoint(), Point::plane(-1.0, 0.0));
        assert_abs_diff_eq!(fwd.length(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bwd.length(), 1.0, epsilon = 1e-12);
    }
}
