//! Rigid transforms between the world, vehicle and camera frames.
//!
//! Conventions: world and vehicle frames are right-handed with vehicle x
//! forward, y left and z up. Camera frames have x right, y down, z forward.

use super::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use crate::scene::{CameraRig, EgoPose};

/// `p ↦ R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> RigidTransform<T> {
    pub fn new(rotation: Mat3<T>, translation: Vec3<T>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::new(Mat3::identity(), Vec3::zero())
    }

    pub fn apply(&self, p: &Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    /// `Rᵀ (p − t)`, computed without forming the inverse.
    pub fn apply_inverse(&self, p: &Vec3<T>) -> Vec3<T> {
        self.rotation.transpose().mul_vec(&(*p - self.translation))
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -rt.mul_vec(&self.translation))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.rotation.mul_mat(&other.rotation),
            self.rotation.mul_vec(&other.translation) + self.translation,
        )
    }

    pub fn cast<U: Real>(&self) -> RigidTransform<U> {
        RigidTransform::new(self.rotation.cast(), self.translation.cast())
    }
}

impl EgoPose {
    pub fn vehicle_to_world(&self) -> RigidTransform<f64> {
        RigidTransform::new(self.rotation, self.translation)
    }
}

impl CameraRig {
    pub fn vehicle_to_camera(&self) -> RigidTransform<f64> {
        RigidTransform::new(self.rotation, self.translation)
    }

    /// Camera center expressed in the vehicle frame, `−Rᵀ T`.
    pub fn center_in_vehicle(&self) -> Vec3<f64> {
        self.vehicle_to_camera().inverse().translation
    }
}

pub fn world_to_vehicle(point_world: &Vec3<f64>, ego: &EgoPose) -> Vec3<f64> {
    ego.vehicle_to_world().apply_inverse(point_world)
}

pub fn vehicle_to_world(point_vehicle: &Vec3<f64>, ego: &EgoPose) -> Vec3<f64> {
    ego.vehicle_to_world().apply(point_vehicle)
}

pub fn vehicle_to_camera(point_vehicle: &Vec3<f64>, cam: &CameraRig) -> Vec3<f64> {
    cam.vehicle_to_camera().apply(point_vehicle)
}

pub fn camera_to_vehicle(point_camera: &Vec3<f64>, cam: &CameraRig) -> Vec3<f64> {
    cam.vehicle_to_camera().apply_inverse(point_camera)
}

/// World point straight into the camera frame for the given ego pose.
pub fn world_to_camera(point_world: &Vec3<f64>, ego: &EgoPose, cam: &CameraRig) -> Vec3<f64> {
    vehicle_to_camera(&world_to_vehicle(point_world, ego), cam)
}
