//! Frame transforms, pinhole projection, box corners and Fourier features.

mod boxes;
mod fourier;
mod linalg;
mod projection;
mod transform;

pub use boxes::{box_corners, corner_signs, corners_from_pose, BoxCorners, BOX_EDGES};
pub use fourier::{fourier_embed, fourier_embed_into, FourierSpec};
pub use linalg::{Mat3, Vec3};
pub use projection::{clip_segment_near, project, project_with_near, Projection, Z_NEAR};
pub use transform::{
    camera_to_vehicle, vehicle_to_camera, vehicle_to_world, world_to_camera, world_to_vehicle, RigidTransform,
};
