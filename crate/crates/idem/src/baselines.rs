//! Classic nearest-neighbour comparison metrics.
//!
//! These are the reference yardsticks the entropy metric is evaluated
//! against: directed RMSE (order-sensitive), Chamfer distance (symmetrized
//! mean of first-power nearest distances), and Hausdorff distance
//! (symmetrized worst case).

use crate::cloud::PointCloud;
use crate::entropy::{kahan_sum, q_tot, EntropyParams};
use crate::error::Result;
use crate::spatial::SpatialIndex;
use crate::transform::RigidTransform;
use crate::{cast, Scalar};
use serde::Serialize;

/// Root mean square of nearest-neighbour distances from each `source` point
/// into `target`. Not symmetric: a cloud contained in another scores zero
/// in the contained direction only.
pub fn rmse_directed<T: Scalar>(source: &PointCloud<T>, target: &PointCloud<T>) -> T {
    let index = SpatialIndex::build(target);
    let sq: Vec<T> = source
        .iter()
        .map(|p| {
            let d = index.nearest_distance(p);
            d * d
        })
        .collect();
    (kahan_sum(sq.into_iter()) / cast::<T>(source.len() as f64)).sqrt()
}

/// Chamfer distance: half the sum of the two directed mean nearest-neighbour
/// distances (first power).
pub fn chamfer<T: Scalar>(cloud1: &PointCloud<T>, cloud2: &PointCloud<T>) -> T {
    let d12 = directed_mean(cloud1, cloud2);
    let d21 = directed_mean(cloud2, cloud1);
    (d12 + d21) / cast::<T>(2.0)
}

/// Hausdorff distance: the larger of the two directed worst-case nearest
/// distances.
pub fn hausdorff<T: Scalar>(cloud1: &PointCloud<T>, cloud2: &PointCloud<T>) -> T {
    directed_max(cloud1, cloud2).max(directed_max(cloud2, cloud1))
}

fn directed_mean<T: Scalar>(source: &PointCloud<T>, target: &PointCloud<T>) -> T {
    let index = SpatialIndex::build(target);
    let d: Vec<T> = source.iter().map(|p| index.nearest_distance(p)).collect();
    kahan_sum(d.into_iter()) / cast::<T>(source.len() as f64)
}

fn directed_max<T: Scalar>(source: &PointCloud<T>, target: &PointCloud<T>) -> T {
    let index = SpatialIndex::build(target);
    source
        .iter()
        .map(|p| index.nearest_distance(p))
        .fold(T::zero(), |m, d| m.max(d))
}

/// All metrics of a pair evaluated at one pose.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport<T> {
    pub q_tot: T,
    pub rmse_1to2: T,
    pub rmse_2to1: T,
    pub chamfer: T,
    pub hausdorff: T,
    pub a: T,
    pub r: T,
    pub pose: RigidTransform<T>,
}

/// Evaluates every metric for the pair as given (pose = identity), with the
/// entropy radius taken from `params`.
pub fn evaluate_pair<T: Scalar>(
    cloud1: &PointCloud<T>,
    cloud2: &PointCloud<T>,
    params: &EntropyParams<T>,
) -> Result<MetricReport<T>> {
    Ok(MetricReport {
        q_tot: q_tot(cloud1, cloud2, params)?,
        rmse_1to2: rmse_directed(cloud1, cloud2),
        rmse_2to1: rmse_directed(cloud2, cloud1),
        chamfer: chamfer(cloud1, cloud2),
        hausdorff: hausdorff(cloud1, cloud2),
        a: params.a,
        r: params.r,
        pose: RigidTransform::identity(),
    })
}
