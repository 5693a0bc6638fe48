//! Small fixed-size vector and matrix types used throughout the crate.

use crate::Scalar;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// A point (or displacement) in 3D space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Point3 { x, y, z }
    }

    pub fn zero() -> Self {
        Point3::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(&self, other: &Point3<T>) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Point3<T>) -> Point3<T> {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Point3<T>) -> T {
        (*self - *other).norm()
    }

    pub fn distance_squared(&self, other: &Point3<T>) -> T {
        (*self - *other).norm_squared()
    }

    pub fn scale(&self, s: T) -> Point3<T> {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Coordinate by axis index, 0 = x, 1 = y, 2 = z.
    pub fn coord(&self, axis: usize) -> T {
        match axis {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {axis} out of range"),
        }
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Total order on coordinates, x then y then z. Used wherever point sets
    /// must be visited in an argument-order-independent sequence.
    pub fn total_cmp(&self, other: &Point3<T>) -> Ordering {
        let key = |v: T| v.to_f64().expect("finite coordinate");
        key(self.x)
            .total_cmp(&key(other.x))
            .then_with(|| key(self.y).total_cmp(&key(other.y)))
            .then_with(|| key(self.z).total_cmp(&key(other.z)))
    }
}

impl<T: Scalar> Add for Point3<T> {
    type Output = Point3<T>;
    fn add(self, rhs: Point3<T>) -> Point3<T> {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Scalar> Sub for Point3<T> {
    type Output = Point3<T>;
    fn sub(self, rhs: Point3<T>) -> Point3<T> {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Scalar> Neg for Point3<T> {
    type Output = Point3<T>;
    fn neg(self) -> Point3<T> {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Index<usize> for Point3<T> {
    type Output = T;
    fn index(&self, axis: usize) -> &T {
        match axis {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis index {axis} out of range"),
        }
    }
}

/// A 3x3 matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T> {
    pub rows: [[T; 3]; 3],
}

impl<T: Scalar> Mat3<T> {
    pub fn new(rows: [[T; 3]; 3]) -> Self {
        Mat3 { rows }
    }

    pub fn identity() -> Self {
        let o = T::one();
        let z = T::zero();
        Mat3::new([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn zeros() -> Self {
        let z = T::zero();
        Mat3::new([[z, z, z], [z, z, z], [z, z, z]])
    }

    pub fn transpose(&self) -> Mat3<T> {
        let r = &self.rows;
        Mat3::new([
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ])
    }

    pub fn apply(&self, p: &Point3<T>) -> Point3<T> {
        let r = &self.rows;
        Point3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        )
    }

    pub fn determinant(&self) -> T {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }
}

impl<T: Scalar> Mul for Mat3<T> {
    type Output = Mat3<T>;
    fn mul(self, rhs: Mat3<T>) -> Mat3<T> {
        let mut out = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = T::zero();
                for k in 0..3 {
                    acc = acc + self.rows[i][k] * rhs.rows[k][j];
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cross_product_follows_right_hand_rule() {
        let x = Point3::new(1.0, 0.0, 0.0);
        let y = Point3::new(0.0, 1.0, 0.0);
        assert_eq!(x.cross(&y), Point3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn distance_is_euclidean() {
        let a = Point3::new(1.0, 2.0, 3.0);
        let b = Point3::new(4.0, 6.0, 3.0);
        assert_relative_eq!(a.distance(&b), 5.0);
    }

    #[test]
    fn matrix_multiply_matches_hand_computation() {
        let a = Mat3::new([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]);
        let b = Mat3::new([[2.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 3.0, 1.0]]);
        let c = a * b;
        assert_eq!(c.rows[0], [4.0, 2.0, 1.0]);
        assert_eq!(c.rows[1], [1.0, 4.0, 1.0]);
        assert_eq!(c.rows[2], [2.0, 3.0, 2.0]);
    }

    #[test]
    fn determinant_of_identity_is_one() {
        assert_relative_eq!(Mat3::<f64>::identity().determinant(), 1.0);
    }

    #[test]
    fn determinant_of_singular_matrix_is_zero() {
        let m = Mat3::new([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]);
        assert_relative_eq!(m.determinant(), 0.0);
    }

    #[test]
    fn total_cmp_orders_by_x_then_y_then_z() {
        let a = Point3::new(1.0, 5.0, 9.0);
        let b = Point3::new(1.0, 5.0, 10.0);
        let c = Point3::new(0.0, 100.0, 0.0);
        assert_eq!(a.total_cmp(&b), std::cmp::Ordering::Less);
        assert_eq!(c.total_cmp(&a), std::cmp::Ordering::Less);
        assert_eq!(a.total_cmp(&a), std::cmp::Ordering::Equal);
    }
}
