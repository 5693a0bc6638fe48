//! Randomized invariants of the alignment metric.

use idem::entropy::{q_tot, EntropyParams};
use idem::transform::apply_transform;
use idem::{Point3, PointCloudD, RigidTransformD};
use proptest::prelude::*;

fn cloud(points: &[(f64, f64, f64)], label: &str) -> PointCloudD {
    let pts = points.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
    PointCloudD::new(pts, label).unwrap()
}

fn points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec(
        (-20.0f64..20.0, -20.0f64..20.0, -20.0f64..20.0),
        n,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_tot_is_symmetric_in_its_arguments(
        pa in points(8..40),
        pb in points(8..40),
    ) {
        let a = cloud(&pa, "a");
        let b = cloud(&pb, "b");
        let params = EntropyParams::for_pair(&a, &b, 1.0).unwrap();
        let forward = q_tot(&a, &b, &params).unwrap();
        let backward = q_tot(&b, &a, &params).unwrap();
        prop_assert!(
            (forward - backward).abs() < 1e-9,
            "forward {forward} vs backward {backward}"
        );
    }

    #[test]
    fn q_tot_is_invariant_under_shared_rigid_motion(
        pa in points(8..40),
        pb in points(8..40),
        ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0,
        angle in -180.0f64..180.0,
        tx in -50.0f64..50.0, ty in -50.0f64..50.0, tz in -50.0f64..50.0,
    ) {
        let a = cloud(&pa, "a");
        let b = cloud(&pb, "b");
        let params = EntropyParams::for_pair(&a, &b, 1.0).unwrap();
        let before = q_tot(&a, &b, &params).unwrap();

        let rot = RigidTransformD::from_axis_angle_deg(Point3::new(ax, ay, az), angle).unwrap();
        let motion = RigidTransformD::translation_only(Point3::new(tx, ty, tz)).compose(&rot);
        let a2 = apply_transform(&a, &motion);
        let b2 = apply_transform(&b, &motion);
        let params2 = EntropyParams::for_pair(&a2, &b2, 1.0).unwrap();
        let after = q_tot(&a2, &b2, &params2).unwrap();

        prop_assert!(
            (before - after).abs() <= 1e-6 * before.abs().max(1.0),
            "before {before} vs after {after}"
        );
    }
}
