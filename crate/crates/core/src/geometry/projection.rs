//! Ideal pinhole projection.

use super::linalg::Vec3;
use crate::scene::CameraRig;

/// Default near plane in meters. Points closer than this are not projected.
pub const Z_NEAR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
    /// `false` for points in front of the near plane; `u` and `v` are NaN then.
    pub valid: bool,
}

impl Projection {
    pub fn pixel(&self) -> Option<[f64; 2]> {
        self.valid.then_some([self.u, self.v])
    }
}

pub fn project(point_camera: &Vec3<f64>, cam: &CameraRig) -> Projection {
    project_with_near(point_camera, cam, Z_NEAR)
}

pub fn project_with_near(point_camera: &Vec3<f64>, cam: &CameraRig, z_near: f64) -> Projection {
    let [x, y, z] = point_camera.0;
    if !(z >= z_near) {
        return Projection { u: f64::NAN, v: f64::NAN, depth: z, valid: false };
    }
    let k = &cam.intrinsics.0;
    Projection {
        u: k[0][0] * x / z + k[0][2],
        v: k[1][1] * y / z + k[1][2],
        depth: z,
        valid: true,
    }
}

/// Clips the camera-frame segment `a`–`b` to `z ≥ z_near` by parametric
/// intersection. Returns `None` when the whole segment is behind the plane.
pub fn clip_segment_near(a: Vec3<f64>, b: Vec3<f64>, z_near: f64) -> Option<(Vec3<f64>, Vec3<f64>)> {
    let (za, zb) = (a.z(), b.z());
    match (za >= z_near, zb >= z_near) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        (a_in, _) => {
            let t = (z_near - za) / (zb - za);
            let mut hit = a + (b - a).scale(t);
            hit[2] = z_near;
            if a_in {
                Some((a, hit))
            } else {
                Some((hit, b))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::test_support::test_camera;

    #[test]
    fn optical_axis_hits_principal_point() {
        let cam = test_camera(64, 48);
        let p = project(&Vec3::new(0.0, 0.0, 5.0), &cam);
        assert!(p.valid);
        assert_eq!((p.u, p.v, p.depth), (cam.intrinsics.0[0][2], cam.intrinsics.0[1][2], 5.0));
    }

    #[test]
    fn projection_is_scale_invariant() {
        let cam = test_camera(64, 48);
        let a = project(&Vec3::new(0.3, -0.2, 4.0), &cam);
        let b = project(&Vec3::new(0.6, -0.4, 8.0), &cam);
        assert!((a.u - b.u).abs() < 1e-12 && (a.v - b.v).abs() < 1e-12);
        assert!(a.depth < b.depth);
    }

    #[test]
    fn behind_near_plane_is_invalid() {
        let cam = test_camera(64, 48);
        let p = project(&Vec3::new(0.0, 0.0, 0.05), &cam);
        assert!(!p.valid && p.pixel().is_none());
        assert!(!project(&Vec3::new(0.0, 0.0, -3.0), &cam).valid);
        assert!(project(&Vec3::new(0.0, 0.0, Z_NEAR), &cam).valid);
    }

    #[test]
    fn clipping_keeps_front_part() {
        let a = Vec3::new(0.0, 0.0, -1.0);
        let b = Vec3::new(0.0, 2.0, 3.0);
        let (p, q) = clip_segment_near(a, b, 0.1).unwrap();
        assert_eq!(p.z(), 0.1);
        assert_eq!(q, b);
        assert!((p.y() - 1.1 / 4.0 * 2.0).abs() < 1e-12);
        assert!(clip_segment_near(a, Vec3::new(1.0, 0.0, -0.5), 0.1).is_none());
    }
}
