//! Gravity-aligned 3D boxes and their corners.

use super::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use crate::scene::Instance;

/// The eight corners of a box. Corner `k` takes the sign pattern of the bits
/// of `k` over (x, y, z) in the box frame, x most significant, with a clear
/// bit meaning the negative half extent: corner 0 is (−l/2, −w/2, −h/2) and
/// corner 7 is (+l/2, +w/2, +h/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxCorners<T> {
    pub corners: [Vec3<T>; 8],
}

/// The 12 box edges as corner-index pairs; each pair differs in one bit.
pub const BOX_EDGES: [(usize, usize); 12] = [
    (0, 1), (2, 3), (4, 5), (6, 7),
    (0, 2), (1, 3), (4, 6), (5, 7),
    (0, 4), (1, 5), (2, 6), (3, 7),
];

pub fn corner_signs<T: Real>(k: usize) -> Vec3<T> {
    let s = |bit: usize| if k & bit != 0 { T::one() } else { -T::one() };
    Vec3::new(s(4), s(2), s(1))
}

/// `center + Rz(yaw) · (signs ⊙ size / 2)` for every corner.
pub fn corners_from_pose<T: Real>(center: Vec3<T>, size: Vec3<T>, yaw: T) -> BoxCorners<T> {
    let rot = Mat3::rot_z(yaw);
    let half = size.scale(T::lit(0.5));
    let corners = std::array::from_fn(|k| center + rot.mul_vec(&corner_signs::<T>(k).mul_elem(&half)));
    BoxCorners { corners }
}

pub fn box_corners(instance: &Instance) -> BoxCorners<f64> {
    corners_from_pose(instance.center, instance.size, instance.yaw)
}

impl<T: Real> BoxCorners<T> {
    pub fn centroid(&self) -> Vec3<T> {
        let sum = self.corners.iter().fold(Vec3::zero(), |acc, c| acc + *c);
        sum.scale(T::lit(0.125))
    }

    pub fn map(&self, f: impl Fn(&Vec3<T>) -> Vec3<T>) -> Self {
        Self { corners: self.corners.map(|c| f(&c)) }
    }

    /// Row-major 8×3 flattening.
    pub fn flatten(&self) -> [T; 24] {
        std::array::from_fn(|i| self.corners[i / 3].0[i % 3])
    }
}
