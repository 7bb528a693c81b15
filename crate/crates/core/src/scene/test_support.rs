//! Scene builders shared by unit tests, integration tests and benches.

use crate::geometry::{Mat3, Vec3};

use super::types::{CameraRig, EgoPose, Frame, Instance, Scene};

/// Forward-looking camera mounted at the vehicle origin: camera z along
/// vehicle x, camera x along vehicle −y, camera y along vehicle −z.
pub fn forward_rotation() -> Mat3<f64> {
    Mat3::from_rows([[0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])
}

pub fn test_camera(width: u32, height: u32) -> CameraRig {
    let f = width as f64 * 0.8;
    CameraRig {
        name: "CAM_FRONT".into(),
        intrinsics: Mat3::from_rows([[f, 0.0, width as f64 / 2.0], [0.0, f, height as f64 / 2.0], [0.0, 0.0, 1.0]]),
        rotation: forward_rotation(),
        translation: Vec3::zero(),
        width,
        height,
    }
}

pub fn ego_at(translation: [f64; 3], yaw: f64) -> EgoPose {
    EgoPose::planar(Vec3(translation), yaw)
}

pub fn simple_instance(track_id: u64, center: [f64; 3]) -> Instance {
    Instance {
        track_id,
        class_label: "car".into(),
        center: Vec3(center),
        size: Vec3::new(4.0, 2.0, 1.6),
        yaw: 0.0,
    }
}

/// `frames` empty frames at 10 Hz, one 64×48 camera, identity ego.
pub fn one_camera_scene(frames: usize) -> Scene {
    Scene {
        scene_id: "test".into(),
        frame_rate: 10.0,
        cameras: vec![test_camera(64, 48)],
        map: vec![],
        frames: (0..frames)
            .map(|i| Frame { index: i as u32, timestamp: i as f64 * 0.1, ego: EgoPose::identity(), instances: vec![] })
            .collect(),
    }
}
