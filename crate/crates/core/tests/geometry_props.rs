mod common;

use common::*;
use physica_core::embed::box_features;
use physica_core::geometry::{
    box_corners, fourier_embed, project, vehicle_to_camera, world_to_camera, FourierSpec, Mat3, RigidTransform, Vec3,
};
use physica_core::rng::SplitMix64;
use physica_core::scene::{EgoPose, Instance};
use proptest::prelude::*;

fn transform(rng: &mut SplitMix64) -> RigidTransform<f64> {
    RigidTransform::new(
        Mat3::from_rows(euler(rng.symmetric(3.2), rng.symmetric(1.5), rng.symmetric(3.2))),
        Vec3::new(rng.symmetric(100.0), rng.symmetric(100.0), rng.symmetric(100.0)),
    )
}

fn close(a: &Vec3<f64>, b: &Vec3<f64>, tol: f64) -> bool {
    a.max_abs_diff(b) < tol
}

proptest! {
    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let (a, b, c) = (transform(&mut rng), transform(&mut rng), transform(&mut rng));
        let p = Vec3::new(rng.symmetric(50.0), rng.symmetric(50.0), rng.symmetric(50.0));
        let left = a.compose(&b).compose(&c).apply(&p);
        let right = a.compose(&b.compose(&c)).apply(&p);
        prop_assert!(close(&left, &right, 1e-9));
        prop_assert!(close(&left, &a.apply(&b.apply(&c.apply(&p))), 1e-9));
    }

    #[test]
    fn inverse_undoes_transform(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let t = transform(&mut rng);
        let p = Vec3::new(rng.symmetric(500.0), rng.symmetric(500.0), rng.symmetric(500.0));
        prop_assert!(close(&t.inverse().apply(&t.apply(&p)), &p, 1e-9));
        prop_assert!(close(&t.apply_inverse(&t.apply(&p)), &p, 1e-9));
        let id = t.compose(&t.inverse());
        prop_assert!(id.rotation.orthonormality_error() < 1e-12);
        prop_assert!(id.translation.norm() < 1e-9);
    }

    #[test]
    fn fourier_values_lie_in_unit_interval(x in -1e3f64..1e3, l in 1usize..12) {
        let e = fourier_embed(&[x], &FourierSpec::new(l));
        prop_assert_eq!(e.len(), 2 * l);
        prop_assert!(e.iter().all(|v| (-1.0..=1.0).contains(v)));
        for pair in e.chunks(2) {
            prop_assert!((pair[0] * pair[0] + pair[1] * pair[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_separates_points_in_unit_range(a in -1.0f64..1.0, b in -1.0f64..1.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let spec = FourierSpec::default();
        prop_assert_ne!(fourier_embed(&[a], &spec), fourier_embed(&[b], &spec));
    }

    #[test]
    fn box_features_ignore_shared_world_motion(seed in any::<u64>()) {
        // The same rigid motion applied to ego and box leaves the vehicle-frame corners unchanged.
        let mut rng = SplitMix64::new(seed);
        let ego = EgoPose::planar(Vec3::new(rng.symmetric(100.0), rng.symmetric(100.0), 0.0), rng.symmetric(3.0));
        let inst = Instance {
            track_id: 1,
            class_label: "car".into(),
            center: Vec3::new(rng.symmetric(100.0), rng.symmetric(100.0), rng.uniform(0.0, 2.0)),
            size: Vec3::new(4.0, 2.0, 1.5),
            yaw: rng.symmetric(3.0),
        };
        let (dx, dy, dyaw) = (rng.symmetric(1000.0), rng.symmetric(1000.0), rng.symmetric(3.0));
        let move_point = |p: Vec3<f64>| {
            let r = Mat3::rot_z(dyaw).mul_vec(&p);
            Vec3::new(r.0[0] + dx, r.0[1] + dy, r.0[2])
        };
        let moved_ego = EgoPose { rotation: Mat3::rot_z(dyaw).mul_mat(&ego.rotation), translation: move_point(ego.translation) };
        let moved_inst = Instance { center: move_point(inst.center), yaw: inst.yaw + dyaw, ..inst.clone() };
        let spec = FourierSpec::new(4);
        let a: Vec<f64> = box_features(&inst, &ego, &spec, 100.0);
        let b: Vec<f64> = box_features(&moved_inst, &moved_ego, &spec, 100.0);
        prop_assert!(max_abs_diff(&a, &b) < 1e-9);
    }
}

#[test]
fn corners_match_independent_construction() {
    let mut rng = SplitMix64::new(3);
    for _ in 0..200 {
        let inst = Instance {
            track_id: 0,
            class_label: "car".into(),
            center: Vec3::new(rng.symmetric(50.0), rng.symmetric(50.0), rng.symmetric(2.0)),
            size: Vec3::new(rng.uniform(0.1, 10.0), rng.uniform(0.1, 4.0), rng.uniform(0.1, 4.0)),
            yaw: rng.symmetric(6.0),
        };
        let mut ours: Vec<[f64; 3]> = box_corners(&inst).corners.iter().map(|c| c.0).collect();
        let mut theirs = oracle_corners(&inst);
        let key = |p: &[f64; 3]| (p[0] * 1e6).round() as i64 * 3 + (p[1] * 1e6).round() as i64 * 7 + (p[2] * 1e6).round() as i64;
        ours.sort_by_key(key);
        theirs.sort_by_key(key);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!(max_abs_diff(a, b) < 1e-12);
        }
    }
}

#[test]
fn projection_matches_pinhole_oracle() {
    let mut rng = SplitMix64::new(8);
    let cam = camera("CAM", 64, 48, 0.2, [1.0, 0.0, 1.5]);
    let k = cam.intrinsics.0;
    for _ in 0..500 {
        let p = Vec3::new(rng.uniform(-10.0, 40.0), rng.symmetric(20.0), rng.symmetric(3.0));
        let c = vehicle_to_camera(&p, &cam);
        let proj = project(&c, &cam);
        match proj.pixel() {
            Some([u, v]) => {
                assert!(c.0[2] >= 0.1);
                assert!((u - (k[0][0] * c.0[0] / c.0[2] + k[0][2])).abs() < 1e-9);
                assert!((v - (k[1][1] * c.0[1] / c.0[2] + k[1][2])).abs() < 1e-9);
            }
            None => assert!(c.0[2] < 0.1),
        }
    }
}

#[test]
fn camera_oracle_agrees_on_extreme_poses() {
    let ego = EgoPose { rotation: Mat3::from_rows(euler(3.1, -1.4, 2.9)), translation: Vec3::new(1e5, -1e5, 30.0) };
    let cam = camera("CAM", 64, 64, -2.0, [0.0, 1.0, 2.0]);
    let p = Vec3::new(1e5 + 3.0, -1e5 - 4.0, 31.0);
    assert!(close(&world_to_camera(&p, &ego, &cam), &Vec3(oracle_world_to_camera(p.0, &ego, &cam)), 1e-9));
}
