//! Rigid transforms: proper rotations plus translation.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::{Mat3, Point3};
use crate::{cast, Scalar};
use serde::{Deserialize, Serialize};

/// Orthonormality tolerance used when validating rotation matrices.
const ORTHONORMALITY_TOL: f64 = 1e-9;

/// A rigid motion `x -> R x + t` with `R` a proper rotation.
///
/// Construction validates `R`, so every value of this type satisfies the
/// rotation invariant and applying a transform cannot fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform<T> {
    rotation: Mat3<T>,
    translation: Point3<T>,
}

impl<T: Scalar> RigidTransform<T> {
    /// Builds a transform after checking that `rotation` is orthonormal with
    /// determinant +1 (tolerance 1e-9).
    pub fn from_parts(rotation: Mat3<T>, translation: Point3<T>) -> Result<Self> {
        let tol = cast::<T>(ORTHONORMALITY_TOL);
        let gram = rotation * rotation.transpose();
        let id = Mat3::<T>::identity();
        for i in 0..3 {
            for j in 0..3 {
                if (gram.rows[i][j] - id.rows[i][j]).abs() > tol {
                    return Err(Error::validation(
                        "rotation matrix is not orthonormal within 1e-9",
                    ));
                }
            }
        }
        if (rotation.determinant() - T::one()).abs() > tol {
            return Err(Error::validation(
                "rotation matrix determinant is not +1 within 1e-9",
            ));
        }
        Ok(RigidTransform {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        RigidTransform {
            rotation: Mat3::identity(),
            translation: Point3::zero(),
        }
    }

    pub fn translation_only(t: Point3<T>) -> Self {
        RigidTransform {
            rotation: Mat3::identity(),
            translation: t,
        }
    }

    /// Rotation about an axis through the origin, angle in degrees.
    pub fn from_axis_angle_deg(axis: Point3<T>, angle_deg: T) -> Result<Self> {
        let n = axis.norm();
        if n < cast::<T>(1e-12) {
            return Err(Error::validation("rotation axis must be non-zero"));
        }
        let u = axis.scale(T::one() / n);
        let theta = angle_deg * cast::<T>(std::f64::consts::PI / 180.0);
        let (s, c) = (theta.sin(), theta.cos());
        let one_c = T::one() - c;
        let (x, y, z) = (u.x, u.y, u.z);
        let rotation = Mat3::new([
            [c + x * x * one_c, x * y * one_c - z * s, x * z * one_c + y * s],
            [y * x * one_c + z * s, c + y * y * one_c, y * z * one_c - x * s],
            [z * x * one_c - y * s, z * y * one_c + x * s, c + z * z * one_c],
        ]);
        Ok(RigidTransform {
            rotation,
            translation: Point3::zero(),
        })
    }

    /// Rotation about an axis through `center`, angle in degrees.
    ///
    /// Used by sweeps and registration, which rotate the moving cloud about
    /// its own centroid rather than the coordinate origin.
    pub fn rotation_about_center(
        center: Point3<T>,
        axis: Point3<T>,
        angle_deg: T,
    ) -> Result<Self> {
        let r = Self::from_axis_angle_deg(axis, angle_deg)?;
        // x -> R (x - c) + c
        let translation = center - r.rotation.apply(&center);
        Ok(RigidTransform {
            rotation: r.rotation,
            translation,
        })
    }

    /// Intrinsic XYZ Euler rotation (Rx * Ry * Rz, angles in degrees) about
    /// `center`, followed by translation `t`. This is the registration pose
    /// parameterization.
    pub fn from_pose(center: Point3<T>, t: Point3<T>, angles_deg: [T; 3]) -> Self {
        let rad = cast::<T>(std::f64::consts::PI / 180.0);
        let (sa, ca) = ((angles_deg[0] * rad).sin(), (angles_deg[0] * rad).cos());
        let (sb, cb) = ((angles_deg[1] * rad).sin(), (angles_deg[1] * rad).cos());
        let (sc, cc) = ((angles_deg[2] * rad).sin(), (angles_deg[2] * rad).cos());
        let rotation = Mat3::new([
            [cb * cc, -cb * sc, sb],
            [ca * sc + sa * sb * cc, ca * cc - sa * sb * sc, -sa * cb],
            [sa * sc - ca * sb * cc, sa * cc + ca * sb * sc, ca * cb],
        ]);
        let translation = center + t - rotation.apply(&center);
        RigidTransform {
            rotation,
            translation,
        }
    }

    /// Recovers `(t, angles_deg)` of [`RigidTransform::from_pose`] for the
    /// given center. Valid away from the pitch singularity at +/-90 degrees,
    /// far beyond any region of interest this crate works in.
    pub fn to_pose(&self, center: Point3<T>) -> (Point3<T>, [T; 3]) {
        let r = &self.rotation.rows;
        let deg = cast::<T>(180.0 / std::f64::consts::PI);
        let beta = r[0][2].asin();
        let alpha = (-r[1][2]).atan2(r[2][2]);
        let gamma = (-r[0][1]).atan2(r[0][0]);
        let t = self.translation - (center - self.rotation.apply(&center));
        (t, [alpha * deg, beta * deg, gamma * deg])
    }

    pub fn rotation(&self) -> &Mat3<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &Point3<T> {
        &self.translation
    }

    pub fn apply(&self, p: &Point3<T>) -> Point3<T> {
        self.rotation.apply(p) + self.translation
    }

    /// `self` after `other`: (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &RigidTransform<T>) -> RigidTransform<T> {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation.apply(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform<T> {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -rt.apply(&self.translation),
        }
    }

    /// Row-major 4x4 homogeneous matrix.
    pub fn to_matrix4(&self) -> [[T; 4]; 4] {
        let r = &self.rotation.rows;
        let t = &self.translation;
        let z = T::zero();
        [
            [r[0][0], r[0][1], r[0][2], t.x],
            [r[1][0], r[1][1], r[1][2], t.y],
            [r[2][0], r[2][1], r[2][2], t.z],
            [z, z, z, T::one()],
        ]
    }

    /// Angle of the rotation part in degrees.
    pub fn rotation_angle_deg(&self) -> T {
        let r = &self.rotation.rows;
        let trace = r[0][0] + r[1][1] + r[2][2];
        let half = (trace - T::one()) / cast::<T>(2.0);
        let clamped = half.max(-T::one()).min(T::one());
        clamped.acos() * cast::<T>(180.0 / std::f64::consts::PI)
    }
}

/// Applies `transform` to every point, returning a new cloud in the same
/// order with the same label.
pub fn apply_transform<T: Scalar>(
    cloud: &PointCloud<T>,
    transform: &RigidTransform<T>,
) -> PointCloud<T> {
    let points = cloud.iter().map(|p| transform.apply(p)).collect();
    PointCloud::new(points, cloud.label()).expect("rigid motion of a valid cloud is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cloud(points: &[(f64, f64, f64)]) -> PointCloud<f64> {
        let pts = points.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        PointCloud::new(pts, "test").unwrap()
    }

    #[test]
    fn identity_leaves_cloud_unchanged() {
        let c = cloud(&[(1.0, 2.0, 3.0), (-4.0, 0.5, 2.0)]);
        let out = apply_transform(&c, &RigidTransform::identity());
        assert_eq!(out.points(), c.points());
    }

    #[test]
    fn translation_shifts_every_point() {
        let c = cloud(&[(0.0, 0.0, 0.0), (1.0, 1.0, 1.0)]);
        let t = RigidTransform::translation_only(Point3::new(1.0, -2.0, 0.5));
        let out = apply_transform(&c, &t);
        assert_eq!(*out.point(0), Point3::new(1.0, -2.0, 0.5));
        assert_eq!(*out.point(1), Point3::new(2.0, -1.0, 1.5));
    }

    #[test]
    fn ninety_degrees_about_z_maps_x_to_y() {
        let r = RigidTransform::from_axis_angle_deg(Point3::new(0.0, 0.0, 1.0), 90.0).unwrap();
        let p = r.apply(&Point3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(p.y, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn non_orthonormal_rotation_is_rejected() {
        let m = Mat3::new([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let err = RigidTransform::from_parts(m, Point3::zero()).unwrap_err();
        assert!(err.to_string().contains("orthonormal"));
    }

    #[test]
    fn reflection_is_rejected() {
        let m = Mat3::new([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let err = RigidTransform::from_parts(m, Point3::zero()).unwrap_err();
        assert!(err.to_string().contains("determinant"));
    }

    #[test]
    fn zero_axis_is_rejected() {
        let err = RigidTransform::<f64>::from_axis_angle_deg(Point3::zero(), 10.0).unwrap_err();
        assert!(matches!(err, crate::Error::Validation(_)));
    }

    #[test]
    fn rotation_about_centroid_fixes_the_centroid() {
        let c = cloud(&[(1.0, 0.0, 0.0), (3.0, 2.0, 5.0), (2.0, 4.0, 1.0)]);
        let centroid = c.centroid();
        let r =
            RigidTransform::rotation_about_center(centroid, Point3::new(0.0, 0.0, 1.0), 37.0)
                .unwrap();
        let rotated = apply_transform(&c, &r);
        let after = rotated.centroid();
        assert_relative_eq!(after.x, centroid.x, epsilon = 1e-12);
        assert_relative_eq!(after.y, centroid.y, epsilon = 1e-12);
        assert_relative_eq!(after.z, centroid.z, epsilon = 1e-12);
    }

    #[test]
    fn pose_roundtrip_recovers_parameters() {
        let center = Point3::new(1.0, -2.0, 0.5);
        let t = Point3::new(0.3, -0.7, 1.1);
        let angles = [4.0, -9.0, 13.5];
        let pose = RigidTransform::from_pose(center, t, angles);
        let (t2, angles2) = pose.to_pose(center);
        assert_relative_eq!(t2.x, t.x, epsilon = 1e-10);
        assert_relative_eq!(t2.y, t.y, epsilon = 1e-10);
        assert_relative_eq!(t2.z, t.z, epsilon = 1e-10);
        for i in 0..3 {
            assert_relative_eq!(angles2[i], angles[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn compose_with_inverse_gives_identity() {
        let r = RigidTransform::rotation_about_center(
            Point3::new(2.0, 0.0, -1.0),
            Point3::new(1.0, 1.0, 0.0),
            25.0,
        )
        .unwrap();
        let id = r.compose(&r.inverse());
        let p = Point3::new(0.4, 0.2, -0.9);
        let q = id.apply(&p);
        assert_relative_eq!(p.distance(&q), 0.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn rigid_motion_preserves_pairwise_distance(
            ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0,
            angle in -180.0f64..180.0,
            tx in -10.0f64..10.0, ty in -10.0f64..10.0, tz in -10.0f64..10.0,
            px in -5.0f64..5.0, py in -5.0f64..5.0, pz in -5.0f64..5.0,
            qx in -5.0f64..5.0, qy in -5.0f64..5.0, qz in -5.0f64..5.0,
        ) {
            let rot = RigidTransform::from_axis_angle_deg(Point3::new(ax, ay, az), angle).unwrap();
            let t = RigidTransform::translation_only(Point3::new(tx, ty, tz)).compose(&rot);
            let p = Point3::new(px, py, pz);
            let q = Point3::new(qx, qy, qz);
            let before = p.distance(&q);
            let after = t.apply(&p).distance(&t.apply(&q));
            prop_assert!((before - after).abs() < 1e-9);
        }

        #[test]
        fn inverse_undoes_pose(
            tx in -3.0f64..3.0, ty in -3.0f64..3.0, tz in -3.0f64..3.0,
            a in -30.0f64..30.0, b in -30.0f64..30.0, c in -30.0f64..30.0,
            px in -5.0f64..5.0, py in -5.0f64..5.0, pz in -5.0f64..5.0,
        ) {
            let pose = RigidTransform::from_pose(
                Point3::zero(),
                Point3::new(tx, ty, tz),
                [a, b, c],
            );
            let p = Point3::new(px, py, pz);
            let back = pose.inverse().apply(&pose.apply(&p));
            prop_assert!(p.distance(&back) < 1e-9);
        }
    }
}
