use crate::geometry::{Mat3, Vec3};
use crate::scene::CameraRig;

/// (name, yaw in degrees, mount position in the vehicle frame).
const SURROUND: [(&str, f64, [f64; 3]); 6] = [
    ("CAM_FRONT", 0.0, [1.7, 0.0, 1.5]),
    ("CAM_FRONT_RIGHT", -55.0, [1.5, -0.5, 1.5]),
    ("CAM_FRONT_LEFT", 55.0, [1.5, 0.5, 1.5]),
    ("CAM_BACK", 180.0, [-1.0, 0.0, 1.5]),
    ("CAM_BACK_LEFT", 110.0, [-0.5, 0.9, 1.5]),
    ("CAM_BACK_RIGHT", -110.0, [-0.5, -0.9, 1.5]),
];

/// Horizontal camera looking along vehicle-frame yaw `yaw`, mounted at `mount`.
pub fn horizontal_camera(name: &str, yaw: f64, mount: [f64; 3], width: u32, height: u32) -> CameraRig {
    let (s, c) = yaw.sin_cos();
    // Rows are the camera axes (right, down, forward) in vehicle coordinates.
    let rotation = Mat3([[s, -c, 0.0], [0.0, 0.0, -1.0], [c, s, 0.0]]);
    let translation = rotation.mul_vec(&Vec3(mount)).scale(-1.0);
    let f = 0.79 * width as f64;
    CameraRig {
        name: name.into(),
        intrinsics: Mat3([[f, 0.0, 0.5 * width as f64], [0.0, f, 0.5 * height as f64], [0.0, 0.0, 1.0]]),
        rotation,
        translation,
        width,
        height,
    }
}

/// Six-camera surround rig covering the full horizon.
pub fn surround_rig(width: u32, height: u32) -> Vec<CameraRig> {
    SURROUND
        .iter()
        .map(|&(name, deg, mount)| horizontal_camera(name, deg.to_radians(), mount, width, height))
        .collect()
}
