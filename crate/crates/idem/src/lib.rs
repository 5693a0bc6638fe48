//! Point cloud alignment quality from differential entropy.
//!
//! The central quantity is `q_tot`: for a pair of clouds, the per-point
//! entropy of the merged cloud is compared against the per-point entropy of
//! each cloud on its own. Perfectly aligned duplicate geometry adds no
//! information, so `q_tot` is zero there and grows as the clouds are pulled
//! out of alignment. On top of the metric this crate provides classic
//! nearest-neighbour baselines, deterministic cloud degradations, grid
//! sweeps over misalignment, a fine registration loop that descends `q_tot`,
//! a Monte Carlo noise-sensitivity harness, and a scenario manifest runner.
//!
//! All geometry is generic over the scalar type through [`Scalar`]; `f64`
//! aliases are exported at the crate root.

pub mod baselines;
pub mod cloud;
pub mod degrade;
pub mod entropy;
pub mod error;
pub mod geom;
pub mod io;
pub mod manifest;
pub mod random;
pub mod register;
pub mod sensitivity;
pub mod spatial;
pub mod sweep;
pub mod transform;

pub use cloud::PointCloud;
pub use error::{Error, Result};
pub use geom::{Mat3, Point3};
pub use random::RandomSource;
pub use transform::RigidTransform;

use num_traits::{Float, FromPrimitive, NumAssign, NumCast};
use std::fmt::{Debug, Display};

/// Floating point scalar the geometry and metrics are generic over.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + NumCast + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Casts an `f64` constant into the working scalar type.
pub(crate) fn cast<T: Scalar>(x: f64) -> T {
    T::from(x).expect("constant representable in scalar type")
}

pub type Point3d = Point3<f64>;
pub type Mat3d = Mat3<f64>;
pub type PointCloudD = PointCloud<f64>;
pub type RigidTransformD = RigidTransform<f64>;

pub type Point3f = Point3<f32>;
pub type Mat3f = Mat3<f32>;
pub type PointCloudF = PointCloud<f32>;
pub type RigidTransformF = RigidTransform<f32>;
