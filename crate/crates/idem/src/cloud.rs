//! Point cloud container.

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::Scalar;

/// An ordered, immutable collection of 3D points.
///
/// Point order is part of the value: degradations return subsets in source
/// order, and deterministic summation contracts depend on stable indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    points: Vec<Point3<T>>,
    label: String,
}

impl<T: Scalar> PointCloud<T> {
    /// Builds a cloud, rejecting empty input and non-finite coordinates.
    pub fn new(points: Vec<Point3<T>>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if points.is_empty() {
            return Err(Error::validation(format!(
                "cloud '{label}' must contain at least one point"
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::validation(format!(
                "cloud '{label}' has a non-finite coordinate at point {i}"
            )));
        }
        Ok(PointCloud { points, label })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point3<T> {
        &self.points[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point3<T>> {
        self.points.iter()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Arithmetic mean of the points.
    pub fn centroid(&self) -> Point3<T> {
        let mut sum = Point3::zero();
        for p in &self.points {
            sum = sum + *p;
        }
        let n = T::from(self.points.len()).expect("count fits in scalar");
        sum.scale(T::one() / n)
    }

    /// Axis-aligned bounding box as (min corner, max corner).
    pub fn bounding_box(&self) -> (Point3<T>, Point3<T>) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
            hi.z = hi.z.max(p.z);
        }
        (lo, hi)
    }

    /// Diagonal length of the bounding box. Upper bound on any inter-point
    /// distance, which is all the separation arguments need.
    pub fn diameter(&self) -> T {
        let (lo, hi) = self.bounding_box();
        lo.distance(&hi)
    }

    /// New cloud keeping only the points at `indices`, in the order given.
    pub fn select(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        PointCloud::new(points, label)
    }

    /// Concatenation used to form the joint cloud of a pair: `self` first,
    /// then `other`, both in their original order.
    pub fn concat(&self, other: &PointCloud<T>) -> PointCloud<T> {
        let mut points = Vec::with_capacity(self.len() + other.len());
        points.extend_from_slice(&self.points);
        points.extend_from_slice(&other.points);
        PointCloud {
            points,
            label: format!("{}+{}", self.label, other.label),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cloud(points: &[(f64, f64, f64)]) -> PointCloud<f64> {
        let pts = points.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        PointCloud::new(pts, "test").unwrap()
    }

    #[test]
    fn empty_cloud_is_rejected() {
        let err = PointCloud::<f64>::new(vec![], "empty").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn non_finite_coordinate_is_rejected() {
        let err =
            PointCloud::new(vec![Point3::new(0.0, f64::NAN, 0.0)], "bad").unwrap_err();
        assert!(err.to_string().contains("non-finite"));
    }

    #[test]
    fn centroid_of_single_point_is_the_point() {
        let c = cloud(&[(1.5, -2.0, 4.0)]);
        assert_eq!(c.centroid(), Point3::new(1.5, -2.0, 4.0));
    }

    #[test]
    fn centroid_of_symmetric_pair_is_midpoint() {
        let c = cloud(&[(-1.0, 0.0, 2.0), (3.0, 4.0, -2.0)]);
        let mid = c.centroid();
        assert_relative_eq!(mid.x, 1.0);
        assert_relative_eq!(mid.y, 2.0);
        assert_relative_eq!(mid.z, 0.0);
    }

    #[test]
    fn bounding_box_spans_extremes() {
        let c = cloud(&[(0.0, 5.0, -1.0), (2.0, -3.0, 7.0), (1.0, 0.0, 0.0)]);
        let (lo, hi) = c.bounding_box();
        assert_eq!(lo, Point3::new(0.0, -3.0, -1.0));
        assert_eq!(hi, Point3::new(2.0, 5.0, 7.0));
    }

    #[test]
    fn concat_keeps_order_first_then_second() {
        let a = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        let b = cloud(&[(5.0, 5.0, 5.0)]);
        let j = a.concat(&b);
        assert_eq!(j.len(), 3);
        assert_eq!(j.point(0), a.point(0));
        assert_eq!(j.point(2), b.point(0));
    }

    #[test]
    fn select_preserves_given_order() {
        let c = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (2.0, 0.0, 0.0)]);
        let s = c.select(&[2, 0], "sub").unwrap();
        assert_eq!(s.point(0).x, 2.0);
        assert_eq!(s.point(1).x, 0.0);
    }
}
