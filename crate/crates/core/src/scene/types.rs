use serde::{Deserialize, Serialize};

use crate::geometry::{Mat3, Vec3};

/// A timed sequence of frames observed by a fixed multi-camera rig.
///
/// Immutable once validated; all coordinates are meters, angles radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub scene_id: String,
    /// Hz.
    pub frame_rate: f64,
    pub cameras: Vec<CameraRig>,
    pub map: Vec<MapElement>,
    pub frames: Vec<Frame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frame {
    pub index: u32,
    /// Seconds.
    pub timestamp: f64,
    pub ego: EgoPose,
    pub instances: Vec<Instance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub track_id: u64,
    pub class_label: String,
    /// Box center in the world frame.
    pub center: Vec3<f64>,
    /// (length, width, height).
    pub size: Vec3<f64>,
    /// Heading about world +z.
    pub yaw: f64,
}

/// Vehicle-to-world pose of the ego vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoPose {
    pub rotation: Mat3<f64>,
    pub translation: Vec3<f64>,
}

/// Pinhole camera with vehicle-to-camera extrinsics `p_cam = R p_vehicle + T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraRig {
    pub name: String,
    pub intrinsics: Mat3<f64>,
    pub rotation: Mat3<f64>,
    pub translation: Vec3<f64>,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapElement {
    pub kind: String,
    pub polyline: Vec<Vec3<f64>>,
}

impl Scene {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_cameras(&self) -> usize {
        self.cameras.len()
    }

    pub fn camera(&self, name: &str) -> Option<&CameraRig> {
        self.cameras.iter().find(|c| c.name == name)
    }
}

impl EgoPose {
    pub fn identity() -> Self {
        Self { rotation: Mat3::identity(), translation: Vec3::zero() }
    }

    /// Planar pose: translation plus heading about +z.
    pub fn planar(translation: Vec3<f64>, yaw: f64) -> Self {
        Self { rotation: Mat3::rot_z(yaw), translation }
    }
}

impl CameraRig {
    pub fn fx(&self) -> f64 {
        self.intrinsics.0[0][0]
    }

    pub fn fy(&self) -> f64 {
        self.intrinsics.0[1][1]
    }

    pub fn cx(&self) -> f64 {
        self.intrinsics.0[0][2]
    }

    pub fn cy(&self) -> f64 {
        self.intrinsics.0[1][2]
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}
