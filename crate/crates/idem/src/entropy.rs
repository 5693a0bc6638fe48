//! The differential-entropy alignment metric.
//!
//! Each point contributes a modified differential entropy
//!
//! ```text
//! h = 1/2 * ln( (2*pi*e)^3 * det(S) + 1 )
//! ```
//!
//! where `S` is the population covariance of the points within radius `r`
//! of it, the point itself included. The `+1` sits inside the logarithm so
//! that h is zero, not negative infinity, for structureless neighborhoods.
//! For a pair of clouds, each point's joint-neighborhood entropy minus its
//! own-cloud entropy gives the per-point quality `q`, and `q_tot` is the
//! sum over the merged cloud.
//!
//! Exactness contracts (duplicate pair gives q_tot = 0.0, fully separated
//! pair gives q_tot = 0.0, swapped arguments give the identical bits) are
//! honoured by visiting every neighborhood in coordinate order with exact
//! duplicates grouped into integer multiplicities, and by summing the q
//! vector in one canonical cloud order with compensated summation.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::geom::{Mat3, Point3};
use crate::spatial::SpatialIndex;
use crate::{cast, Scalar};
use rayon::prelude::*;
use std::cmp::Ordering;

/// Neighborhood radius selection for a cloud pair.
///
/// `a` is the dimensionless scale factor and `r = a * weighted_r4th` the
/// resulting absolute radius. Entropy values depend on the coordinate unit;
/// clouds are consumed as-is, without normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams<T> {
    pub a: T,
    pub r: T,
}

impl<T: Scalar> EntropyParams<T> {
    /// Radius from the pair's weighted mean 4th-neighbor distance scaled by
    /// `a`. The recommended default is `a = 1`.
    pub fn for_pair(cloud1: &PointCloud<T>, cloud2: &PointCloud<T>, a: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::validation("scale factor a must be positive"));
        }
        let r = a * weighted_r4th(cloud1, cloud2)?;
        Ok(EntropyParams { a, r })
    }

    /// Params with an explicitly fixed radius, used when a radius frozen at
    /// some reference pose must be reused across evaluations.
    pub fn with_radius(a: T, r: T) -> Result<Self> {
        if !(a > T::zero()) || !(r > T::zero()) {
            return Err(Error::validation("a and r must be positive"));
        }
        Ok(EntropyParams { a, r })
    }
}

/// Per-point entropies of one cloud at a fixed radius.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile<T> {
    pub h: Vec<T>,
    pub radius: T,
}

impl<T: Scalar> EntropyProfile<T> {
    /// Total cloud entropy, summed in index order with compensation.
    pub fn total(&self) -> T {
        kahan_sum(self.h.iter().copied())
    }
}

/// Per-point quality of a cloud pair: entry `i` is the joint-neighborhood
/// entropy minus the own-cloud entropy of joint point `i`. Indices `0..split`
/// belong to the first cloud, the rest to the second.
#[derive(Debug, Clone, PartialEq)]
pub struct QVector<T> {
    pub q: Vec<T>,
    pub split: usize,
}

impl<T: Scalar> QVector<T> {
    /// Sum of the per-point qualities in index order with compensation.
    pub fn q_tot(&self) -> T {
        kahan_sum(self.q.iter().copied())
    }
}

/// Population covariance (normalization by the point count) of a point set.
pub fn covariance<T: Scalar>(points: &[Point3<T>]) -> Mat3<T> {
    let mut scratch: Vec<Point3<T>> = points.to_vec();
    canonical_covariance(&mut scratch).0
}

/// Modified differential entropy of one neighborhood.
///
/// Returns exactly zero when fewer than four distinct positions are present:
/// the covariance is then rank-deficient, and only distinct positions can
/// contribute rank.
pub fn point_entropy<T: Scalar>(points: &[Point3<T>]) -> T {
    let mut scratch: Vec<Point3<T>> = points.to_vec();
    entropy_of_set(&mut scratch)
}

/// Per-point entropies of `cloud` with neighborhoods of radius `radius`.
pub fn cloud_entropy<T: Scalar>(cloud: &PointCloud<T>, radius: T) -> Result<EntropyProfile<T>> {
    if !(radius > T::zero()) {
        return Err(Error::validation("radius must be positive"));
    }
    let index = SpatialIndex::build(cloud);
    let h = (0..cloud.len())
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(idx_buf, pt_buf), i| {
                index.radius_into(cloud.point(i), radius, idx_buf);
                gather(cloud, idx_buf, pt_buf);
                entropy_of_set(pt_buf)
            },
        )
        .collect();
    Ok(EntropyProfile { h, radius })
}

/// Mean distance from each point to its 4th nearest other point.
pub fn r4th_mean<T: Scalar>(cloud: &PointCloud<T>) -> Result<T> {
    if cloud.len() < 5 {
        return Err(Error::validation(format!(
            "r4th needs at least 5 points, cloud '{}' has {}",
            cloud.label(),
            cloud.len()
        )));
    }
    let index = SpatialIndex::build(cloud);
    let distances: Vec<T> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            index
                .kth_neighbor_distance(i, 4)
                .expect("k = 4 valid for 5+ points")
        })
        .collect();
    let n = cast::<T>(cloud.len() as f64);
    Ok(kahan_sum(distances.into_iter()) / n)
}

/// Pair radius statistic: each cloud's `r4th_mean` weighted by the share of
/// points in the *other* cloud, so the sparser cloud dominates.
pub fn weighted_r4th<T: Scalar>(cloud1: &PointCloud<T>, cloud2: &PointCloud<T>) -> Result<T> {
    let r1 = r4th_mean(cloud1)?;
    let r2 = r4th_mean(cloud2)?;
    Ok(cross_weighted_mean(r1, cloud1.len(), r2, cloud2.len()))
}

pub(crate) fn cross_weighted_mean<T: Scalar>(r1: T, n1: usize, r2: T, n2: usize) -> T {
    let total = cast::<T>((n1 + n2) as f64);
    let w1 = cast::<T>(n2 as f64) / total;
    let w2 = cast::<T>(n1 as f64) / total;
    r1 * w1 + r2 * w2
}

/// Per-point quality vector of a pair at radius `radius`, laid out as the
/// joint cloud: `cloud1`'s points first, then `cloud2`'s.
///
/// The layout follows the argument order; the scalar summary [`q_tot`]
/// canonicalizes the order instead, so swapping arguments there changes
/// nothing, not even the last bit.
pub fn q_vector<T: Scalar>(
    cloud1: &PointCloud<T>,
    cloud2: &PointCloud<T>,
    radius: T,
) -> Result<QVector<T>> {
    if !(radius > T::zero()) {
        return Err(Error::validation("radius must be positive"));
    }
    let joint = cloud1.concat(cloud2);
    let joint_index = SpatialIndex::build(&joint);
    let index1 = SpatialIndex::build(cloud1);
    let index2 = SpatialIndex::build(cloud2);
    let split = cloud1.len();

    let q = (0..joint.len())
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(idx_buf, pt_buf), i| {
                let p = joint.point(i);
                joint_index.radius_into(p, radius, idx_buf);
                gather(&joint, idx_buf, pt_buf);
                let h_joint = entropy_of_set(pt_buf);

                let (own_cloud, own_index) = if i < split {
                    (cloud1, &index1)
                } else {
                    (cloud2, &index2)
                };
                own_index.radius_into(p, radius, idx_buf);
                gather(own_cloud, idx_buf, pt_buf);
                let h_own = entropy_of_set(pt_buf);

                h_joint - h_own
            },
        )
        .collect();

    Ok(QVector { q, split })
}

/// Total alignment quality of a pair: the sum of [`q_vector`] entries.
///
/// Zero means the clouds are indistinguishable from one cloud at radius
/// `params.r`, either perfectly aligned duplicate geometry or complete
/// separation; misalignment inside the overlap region drives it up.
pub fn q_tot<T: Scalar>(
    cloud1: &PointCloud<T>,
    cloud2: &PointCloud<T>,
    params: &EntropyParams<T>,
) -> Result<T> {
    let (first, second) = match cloud_order(cloud1, cloud2) {
        Ordering::Greater => (cloud2, cloud1),
        _ => (cloud1, cloud2),
    };
    Ok(q_vector(first, second, params.r)?.q_tot())
}

/// Total order on clouds (size, then coordinates, then label) fixing the
/// canonical P1/P2 roles inside [`q_tot`].
fn cloud_order<T: Scalar>(a: &PointCloud<T>, b: &PointCloud<T>) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (p, q) in a.iter().zip(b.iter()) {
            let ord = p.total_cmp(q);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        a.label().cmp(b.label())
    })
}

fn gather<T: Scalar>(cloud: &PointCloud<T>, indices: &[usize], out: &mut Vec<Point3<T>>) {
    out.clear();
    out.extend(indices.iter().map(|&i| *cloud.point(i)));
}

/// Entropy of a neighborhood given as a scratch point list (reordered in
/// place).
fn entropy_of_set<T: Scalar>(points: &mut Vec<Point3<T>>) -> T {
    let (cov, distinct) = canonical_covariance(points);
    if distinct <= 3 {
        return T::zero();
    }
    let det = cov.determinant().max(T::zero());
    let c = cast::<T>(TWO_PI_E_CUBED);
    cast::<T>(0.5) * (c * det + T::one()).ln()
}

const TWO_PI_E_CUBED: f64 = 4982.221720901876;

/// Population covariance visited in coordinate order with exact duplicates
/// grouped, so the result depends only on the multiset of positions. Returns
/// the matrix and the number of distinct positions.
///
/// Grouping is what makes the duplicate-cloud identity exact: a neighborhood
/// doubled point-for-point turns into the same groups with doubled integer
/// weights, and every intermediate float of the accumulation scales by
/// exactly two.
fn canonical_covariance<T: Scalar>(points: &mut Vec<Point3<T>>) -> (Mat3<T>, usize) {
    let k_total = points.len();
    if k_total == 0 {
        return (Mat3::zeros(), 0);
    }
    points.sort_unstable_by(|a, b| a.total_cmp(b));

    let inv_n = T::one() / cast::<T>(k_total as f64);

    let mut mean = Point3::zero();
    let mut distinct = 0usize;
    for_groups(points, |v, w| {
        distinct += 1;
        let wt = cast::<T>(w as f64);
        mean = mean + v.scale(wt);
    });
    mean = mean.scale(inv_n);

    let mut m = [[T::zero(); 3]; 3];
    for_groups(points, |v, w| {
        let wt = cast::<T>(w as f64);
        let d = v - mean;
        let da = d.to_array();
        for i in 0..3 {
            for j in i..3 {
                m[i][j] = m[i][j] + wt * (da[i] * da[j]);
            }
        }
    });
    for i in 0..3 {
        for j in i..3 {
            m[i][j] = m[i][j] * inv_n;
            m[j][i] = m[i][j];
        }
    }
    (Mat3::new(m), distinct)
}

/// Calls `f(position, multiplicity)` for each run of identical points in a
/// coordinate-sorted slice.
fn for_groups<T: Scalar>(sorted: &[Point3<T>], mut f: impl FnMut(Point3<T>, usize)) {
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        f(v, j - i);
        i = j;
    }
}

/// Kahan compensated summation in iteration order.
pub(crate) fn kahan_sum<T: Scalar>(values: impl Iterator<Item = T>) -> T {
    // Neumaier's variant: compensation also covers the case where the
    // incoming term is larger than the running sum.
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{apply_transform, RigidTransform};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn cloud(points: &[(f64, f64, f64)]) -> PointCloud<f64> {
        let pts = points.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        PointCloud::new(pts, "test").unwrap()
    }

    fn random_points(n: usize, seed: u64, extent: f64) -> Vec<Point3<f64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-extent..extent),
                    rng.gen_range(-extent..extent),
                    rng.gen_range(-extent..extent),
                )
            })
            .collect()
    }

    /// Plain two-pass covariance in natural order, kept deliberately free of
    /// the grouping and sorting machinery of the implementation.
    fn covariance_oracle(points: &[Point3<f64>]) -> [[f64; 3]; 3] {
        let n = points.len() as f64;
        let mut mean = [0.0; 3];
        for p in points {
            let a = p.to_array();
            for i in 0..3 {
                mean[i] += a[i];
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut cov = [[0.0; 3]; 3];
        for p in points {
            let a = p.to_array();
            for i in 0..3 {
                for j in 0..3 {
                    cov[i][j] += (a[i] - mean[i]) * (a[j] - mean[j]);
                }
            }
        }
        for row in &mut cov {
            for v in row.iter_mut() {
                *v /= n;
            }
        }
        cov
    }

    fn entropy_oracle(points: &[Point3<f64>]) -> f64 {
        let distinct = {
            let mut seen: Vec<[u64; 3]> = points
                .iter()
                .map(|p| [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()])
                .collect();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        };
        if distinct <= 3 {
            return 0.0;
        }
        let cov = covariance_oracle(points);
        let det = cov[0][0] * (cov[1][1] * cov[2][2] - cov[1][2] * cov[2][1])
            - cov[0][1] * (cov[1][0] * cov[2][2] - cov[1][2] * cov[2][0])
            + cov[0][2] * (cov[1][0] * cov[2][1] - cov[1][1] * cov[2][0]);
        0.5 * (TWO_PI_E_CUBED * det.max(0.0) + 1.0).ln()
    }

    #[test]
    fn covariance_of_single_point_is_zero() {
        let c = covariance(&[Point3::new(3.0, -1.0, 2.0)]);
        assert_eq!(c, Mat3::zeros());
    }

    #[test]
    fn covariance_of_plus_minus_one_on_x_is_unit_variance() {
        // population normalization: var = ((1)^2 + (-1)^2) / 2 = 1
        let c = covariance(&[Point3::new(1.0, 0.0, 0.0), Point3::new(-1.0, 0.0, 0.0)]);
        assert_relative_eq!(c.rows[0][0], 1.0);
        for i in 0..3 {
            for j in 0..3 {
                if (i, j) != (0, 0) {
                    assert_relative_eq!(c.rows[i][j], 0.0);
                }
            }
        }
    }

    #[test]
    fn covariance_matches_plain_two_pass_oracle() {
        let pts = random_points(50, 11, 5.0);
        let got = covariance(&pts);
        let expected = covariance_oracle(&pts);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(got.rows[i][j], expected[i][j], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn covariance_determinant_scales_with_sixth_power() {
        let pts = random_points(40, 3, 2.0);
        let scaled: Vec<_> = pts.iter().map(|p| p.scale(2.5)).collect();
        let d1 = covariance(&pts).determinant();
        let d2 = covariance(&scaled).determinant();
        assert_relative_eq!(d2, d1 * 2.5f64.powi(6), max_relative = 1e-10);
    }

    #[test]
    fn entropy_of_three_or_fewer_distinct_points_is_exactly_zero() {
        let pts = random_points(3, 4, 5.0);
        assert_eq!(point_entropy(&pts), 0.0);
        // duplicates add no rank: six points, three distinct positions
        let mut doubled = pts.clone();
        doubled.extend_from_slice(&pts);
        assert_eq!(point_entropy(&doubled), 0.0);
    }

    #[test]
    fn tetrahedron_entropy_matches_frozen_value() {
        // population covariance of these four vertices is the identity,
        // so h = ln((2*pi*e)^3 + 1) / 2
        let pts = [
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ];
        assert_relative_eq!(point_entropy(&pts), 4.256915946378234, max_relative = 1e-14);
        assert_relative_eq!(point_entropy(&pts), entropy_oracle(&pts), max_relative = 1e-14);
    }

    #[test]
    fn entropy_matches_oracle_on_random_sets() {
        for seed in 0..10 {
            let pts = random_points(25, seed, 1.5);
            assert_relative_eq!(
                point_entropy(&pts),
                entropy_oracle(&pts),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn entropy_of_duplicated_set_is_bit_identical() {
        let pts = random_points(20, 8, 2.0);
        let mut doubled = pts.clone();
        doubled.extend(pts.iter().rev().copied());
        assert_eq!(point_entropy(&pts), point_entropy(&doubled));
    }

    #[test]
    fn entropy_is_never_negative() {
        for seed in 0..20 {
            let pts = random_points(6, seed, 1e-6);
            assert!(point_entropy(&pts) >= 0.0);
        }
    }

    #[test]
    fn cloud_entropy_of_isolated_points_is_zero() {
        let c = cloud(&[(0.0, 0.0, 0.0), (100.0, 0.0, 0.0), (0.0, 100.0, 0.0), (0.0, 0.0, 100.0), (50.0, 50.0, 50.0)]);
        let profile = cloud_entropy(&c, 1.0).unwrap();
        assert!(profile.h.iter().all(|&h| h == 0.0));
        assert_eq!(profile.total(), 0.0);
    }

    #[test]
    fn cloud_entropy_recomputes_per_point_neighborhoods() {
        let c = PointCloud::new(random_points(30, 21, 2.0), "rand").unwrap();
        let r = 1.2;
        let profile = cloud_entropy(&c, r).unwrap();
        for (i, &h) in profile.h.iter().enumerate() {
            let members: Vec<Point3<f64>> = c
                .iter()
                .filter(|p| p.distance_squared(c.point(i)) <= r * r)
                .copied()
                .collect();
            assert_relative_eq!(h, entropy_oracle(&members), max_relative = 1e-11);
        }
    }

    #[test]
    fn r4th_of_unit_spaced_line_of_five_is_exact() {
        let c = cloud(&[
            (0.0, 0.0, 0.0),
            (1.0, 0.0, 0.0),
            (2.0, 0.0, 0.0),
            (3.0, 0.0, 0.0),
            (4.0, 0.0, 0.0),
        ]);
        // per point: 4, 3, 2, 3, 4 -> mean 16/5
        assert_relative_eq!(r4th_mean(&c).unwrap(), 3.2);
    }

    #[test]
    fn r4th_of_unit_grid_accounts_for_corners() {
        let mut pts = Vec::new();
        for x in 0..10 {
            for y in 0..10 {
                for z in 0..10 {
                    pts.push((x as f64, y as f64, z as f64));
                }
            }
        }
        let c = cloud(&pts);
        // corners see three axis neighbors then a diagonal: (992 + 8*sqrt(2))/1000
        assert_relative_eq!(
            r4th_mean(&c).unwrap(),
            1.0033137084989847,
            max_relative = 1e-13
        );
    }

    #[test]
    fn r4th_requires_five_points() {
        let c = cloud(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (2.0, 0.0, 0.0), (3.0, 0.0, 0.0)]);
        assert!(r4th_mean(&c).is_err());
    }

    #[test]
    fn cross_weighting_favors_the_sparser_cloud() {
        // r1 = 2 with 900 points, r2 = 6 with 100 points:
        // 2 * 100/1000 + 6 * 900/1000 = 5.6
        assert_relative_eq!(cross_weighted_mean(2.0, 900, 6.0, 100), 5.6, epsilon = 1e-12);
    }

    #[test]
    fn weighted_r4th_of_identical_clouds_is_their_r4th() {
        let c = PointCloud::new(random_points(60, 2, 4.0), "a").unwrap();
        let r = r4th_mean(&c).unwrap();
        assert_relative_eq!(weighted_r4th(&c, &c).unwrap(), r, max_relative = 1e-15);
    }

    #[test]
    fn duplicate_pair_q_vector_is_exactly_zero() {
        let c = PointCloud::new(random_points(80, 5, 3.0), "dup").unwrap();
        let r = r4th_mean(&c).unwrap();
        let qv = q_vector(&c, &c, r).unwrap();
        assert_eq!(qv.q.len(), 160);
        assert_eq!(qv.split, 80);
        assert!(qv.q.iter().all(|&q| q == 0.0), "max |q| = {:?}",
            qv.q.iter().fold(0.0f64, |m, &q| m.max(q.abs())));
        assert_eq!(qv.q_tot(), 0.0);
    }

    #[test]
    fn separated_pair_q_vector_is_exactly_zero() {
        let a = PointCloud::new(random_points(50, 6, 2.0), "a").unwrap();
        let shift = RigidTransform::translation_only(Point3::new(500.0, 0.0, 0.0));
        let b = apply_transform(&PointCloud::new(random_points(70, 7, 2.0), "b").unwrap(), &shift);
        let qv = q_vector(&a, &b, 1.0).unwrap();
        assert!(qv.q.iter().all(|&q| q == 0.0));
        assert_eq!(qv.q_tot(), 0.0);
    }

    #[test]
    fn q_tot_is_bitwise_commutative() {
        let a = PointCloud::new(random_points(60, 12, 2.0), "a").unwrap();
        let mut b_pts = random_points(45, 13, 2.0);
        for p in &mut b_pts {
            p.x += 0.4;
        }
        let b = PointCloud::new(b_pts, "b").unwrap();
        let params = EntropyParams::for_pair(&a, &b, 1.0).unwrap();
        let ab = q_tot(&a, &b, &params).unwrap();
        let ba = q_tot(&b, &a, &params).unwrap();
        assert_eq!(ab, ba);
        assert!(ab > 0.0);
    }

    #[test]
    fn q_tot_matches_brute_force_on_a_small_pair() {
        let a = PointCloud::new(random_points(12, 30, 1.0), "a").unwrap();
        let mut b_pts = random_points(10, 31, 1.0);
        for p in &mut b_pts {
            p.x += 0.3;
        }
        let b = PointCloud::new(b_pts, "b").unwrap();
        let r = 0.8;

        let mut expected = 0.0;
        let joint: Vec<Point3<f64>> = a.iter().chain(b.iter()).copied().collect();
        for (i, p) in joint.iter().enumerate() {
            let members: Vec<Point3<f64>> = joint
                .iter()
                .filter(|m| m.distance_squared(p) <= r * r)
                .copied()
                .collect();
            let own: Vec<Point3<f64>> = if i < a.len() { a.points() } else { b.points() }
                .iter()
                .filter(|m| m.distance_squared(p) <= r * r)
                .copied()
                .collect();
            expected += entropy_oracle(&members) - entropy_oracle(&own);
        }

        let got = q_vector(&a, &b, r).unwrap().q_tot();
        assert_relative_eq!(got, expected, max_relative = 1e-11);
    }

    #[test]
    fn q_tot_is_rigid_invariant() {
        let a = PointCloud::new(random_points(50, 40, 2.0), "a").unwrap();
        let mut b_pts = random_points(40, 41, 2.0);
        for p in &mut b_pts {
            p.y += 0.5;
        }
        let b = PointCloud::new(b_pts, "b").unwrap();
        let params = EntropyParams::for_pair(&a, &b, 1.0).unwrap();
        let q0 = q_tot(&a, &b, &params).unwrap();

        let motion = RigidTransform::rotation_about_center(
            Point3::new(1.0, -1.0, 2.0),
            Point3::new(1.0, 2.0, 3.0),
            33.0,
        )
        .unwrap()
        .compose(&RigidTransform::translation_only(Point3::new(5.0, -7.0, 11.0)));
        let q1 = q_tot(
            &apply_transform(&a, &motion),
            &apply_transform(&b, &motion),
            &params,
        )
        .unwrap();
        assert_relative_eq!(q0, q1, max_relative = 1e-9);
    }

    #[test]
    fn q_tot_works_in_f32() {
        let pts: Vec<Point3<f32>> = random_points(30, 50, 2.0)
            .into_iter()
            .map(|p| Point3::new(p.x as f32, p.y as f32, p.z as f32))
            .collect();
        let a = PointCloud::new(pts, "a32").unwrap();
        let params = EntropyParams::for_pair(&a, &a, 1.0f32).unwrap();
        assert_eq!(q_tot(&a, &a, &params).unwrap(), 0.0f32);
    }

    #[test]
    fn kahan_sum_handles_magnitude_spread() {
        let values = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(values.into_iter()), 2.0);
    }
}
