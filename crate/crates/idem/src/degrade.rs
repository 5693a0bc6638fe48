//! Deterministic cloud degradations.
//!
//! Each operation is a pure function of (cloud, parameters, seed): the same
//! inputs give bit-identical outputs on every platform, which is what makes
//! degradation-based experiment rows reproducible. Subset-producing
//! operations (downsample, holes, crop) keep surviving points in source
//! order.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::random::RandomSource;
use crate::{cast, Scalar};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which side of a crop plane survives; the plane itself belongs to both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeepSide {
    /// Keep points with signed distance <= offset.
    Below,
    /// Keep points with signed distance >= offset.
    Above,
}

/// A configured degradation recipe, as written in experiment manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DegradationSpec<T> {
    Downsample {
        fraction: T,
        seed: u64,
    },
    BboxNoise {
        percent: T,
        seed: u64,
    },
    Holes {
        seeds: usize,
        neighbors_per_seed: usize,
        seed: u64,
    },
    PartialCrop {
        normal: [T; 3],
        offset: T,
        keep: KeepSide,
    },
    GaussianPerturb {
        sigma: T,
        seed: u64,
    },
}

/// Applies one recipe.
pub fn apply<T: Scalar>(cloud: &PointCloud<T>, spec: &DegradationSpec<T>) -> Result<PointCloud<T>> {
    match spec {
        DegradationSpec::Downsample { fraction, seed } => downsample(cloud, *fraction, *seed),
        DegradationSpec::BboxNoise { percent, seed } => add_bbox_noise(cloud, *percent, *seed),
        DegradationSpec::Holes {
            seeds,
            neighbors_per_seed,
            seed,
        } => punch_holes(cloud, *seeds, *neighbors_per_seed, *seed),
        DegradationSpec::PartialCrop {
            normal,
            offset,
            keep,
        } => partial_crop(
            cloud,
            Point3::new(normal[0], normal[1], normal[2]),
            *offset,
            *keep,
        ),
        DegradationSpec::GaussianPerturb { sigma, seed } => gaussian_perturb(cloud, *sigma, *seed),
    }
}

/// Random subset with `round(fraction * n)` points, kept in source order.
pub fn downsample<T: Scalar>(cloud: &PointCloud<T>, fraction: T, seed: u64) -> Result<PointCloud<T>> {
    let f = fraction.to_f64().unwrap_or(f64::NAN);
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::validation(format!(
            "downsample fraction must be in (0, 1], got {f}"
        )));
    }
    let n = cloud.len();
    let count = (f * n as f64).round() as usize;
    if count == 0 {
        return Err(Error::validation("downsample fraction keeps no points"));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = RandomSource::new(seed).rng();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut chosen = indices[..count].to_vec();
    chosen.sort_unstable();
    cloud.select(&chosen, cloud.label())
}

/// Appends `round(percent/100 * n)` points drawn uniformly from the cloud's
/// axis-aligned bounding box. Original points come first, unchanged.
pub fn add_bbox_noise<T: Scalar>(cloud: &PointCloud<T>, percent: T, seed: u64) -> Result<PointCloud<T>> {
    let pct = percent.to_f64().unwrap_or(f64::NAN);
    if !(pct >= 0.0 && pct.is_finite()) {
        return Err(Error::validation(format!(
            "noise percent must be non-negative, got {pct}"
        )));
    }
    let n = cloud.len();
    let count = (pct / 100.0 * n as f64).round() as usize;
    let (lo, hi) = cloud.bounding_box();
    let span = hi - lo;
    let mut rng = RandomSource::new(seed).rng();
    let mut points = cloud.points().to_vec();
    points.reserve(count);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let w: f64 = rng.gen();
        points.push(Point3::new(
            lo.x + cast::<T>(u) * span.x,
            lo.y + cast::<T>(v) * span.y,
            lo.z + cast::<T>(w) * span.z,
        ));
    }
    PointCloud::new(points, cloud.label())
}

/// Removes exactly `seeds * neighbors_per_seed` points grouped around
/// randomly chosen seed points.
///
/// Each seed removes itself plus its nearest points. Overlapping removal
/// regions would undercount, so after deduplication the seeds take turns
/// claiming their next-nearest surviving point until the count is exact.
pub fn punch_holes<T: Scalar>(
    cloud: &PointCloud<T>,
    seeds: usize,
    neighbors_per_seed: usize,
    seed: u64,
) -> Result<PointCloud<T>> {
    let n = cloud.len();
    if seeds == 0 || neighbors_per_seed == 0 {
        return Err(Error::validation("seeds and neighbors_per_seed must be positive"));
    }
    let target = seeds
        .checked_mul(neighbors_per_seed)
        .ok_or_else(|| Error::validation("hole size overflow"))?;
    if target >= n {
        return Err(Error::validation(format!(
            "holes would remove {target} of {n} points; at least one must survive"
        )));
    }

    // seed indices, drawn without replacement, in draw order
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = RandomSource::new(seed).rng();
    for i in 0..seeds {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let seed_indices = &indices[..seeds];

    // per seed, every index sorted by distance (ties by index); the seed
    // itself sits first at distance zero
    let rankings: Vec<Vec<usize>> = seed_indices
        .iter()
        .map(|&s| {
            let sp = *cloud.point(s);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by(|&a, &b| {
                let da = cloud.point(a).distance_squared(&sp).to_f64().unwrap();
                let db = cloud.point(b).distance_squared(&sp).to_f64().unwrap();
                da.total_cmp(&db).then(a.cmp(&b))
            });
            order
        })
        .collect();

    let mut removed = vec![false; n];
    let mut removed_count = 0usize;
    let claim = |i: usize, removed: &mut Vec<bool>, removed_count: &mut usize| {
        if !removed[i] {
            removed[i] = true;
            *removed_count += 1;
        }
    };

    for ranking in &rankings {
        for &i in ranking.iter().take(neighbors_per_seed) {
            claim(i, &mut removed, &mut removed_count);
        }
    }

    let mut cursors = vec![neighbors_per_seed; seeds];
    'outer: while removed_count < target {
        for (s, ranking) in rankings.iter().enumerate() {
            while cursors[s] < n && removed[ranking[cursors[s]]] {
                cursors[s] += 1;
            }
            if cursors[s] < n {
                claim(ranking[cursors[s]], &mut removed, &mut removed_count);
                if removed_count == target {
                    break 'outer;
                }
            }
        }
    }

    let survivors: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
    cloud.select(&survivors, cloud.label())
}

/// Keeps the points on one side of a plane, boundary inclusive.
///
/// `normal` is normalized internally, so `offset` is the plane's signed
/// distance from the origin.
pub fn partial_crop<T: Scalar>(
    cloud: &PointCloud<T>,
    normal: Point3<T>,
    offset: T,
    keep: KeepSide,
) -> Result<PointCloud<T>> {
    let len = normal.norm();
    if len < cast::<T>(1e-12) {
        return Err(Error::validation("crop plane normal must be non-zero"));
    }
    let unit = normal.scale(T::one() / len);
    let survivors: Vec<usize> = (0..cloud.len())
        .filter(|&i| {
            let d = cloud.point(i).dot(&unit);
            match keep {
                KeepSide::Below => d <= offset,
                KeepSide::Above => d >= offset,
            }
        })
        .collect();
    if survivors.is_empty() {
        return Err(Error::validation("crop removes every point"));
    }
    cloud.select(&survivors, cloud.label())
}

/// Adds independent zero-mean gaussian noise to every coordinate.
pub fn gaussian_perturb<T: Scalar>(cloud: &PointCloud<T>, sigma: T, seed: u64) -> Result<PointCloud<T>> {
    let s = sigma.to_f64().unwrap_or(f64::NAN);
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::validation(format!(
            "sigma must be non-negative, got {s}"
        )));
    }
    let mut rng = RandomSource::new(seed).rng();
    let mut points = Vec::with_capacity(cloud.len());
    for p in cloud.iter() {
        let zx: f64 = rng.sample(rand_distr::StandardNormal);
        let zy: f64 = rng.sample(rand_distr::StandardNormal);
        let zz: f64 = rng.sample(rand_distr::StandardNormal);
        points.push(Point3::new(
            p.x + sigma * cast::<T>(zx),
            p.y + sigma * cast::<T>(zy),
            p.z + sigma * cast::<T>(zz),
        ));
    }
    PointCloud::new(points, cloud.label())
}
