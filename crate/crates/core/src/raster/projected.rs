use std::cmp::Ordering;

use super::primitives::{convex_hull, Point2};
use crate::geometry::{box_corners, project_with_near, world_to_camera, Vec3};
use crate::scene::{CameraRig, EgoPose, Instance};

/// A box seen from one camera at one frame.
#[derive(Debug, Clone)]
pub struct ProjectedBox<'a> {
    pub instance: &'a Instance,
    /// Camera-frame z of the box center; the occlusion key.
    pub depth: f64,
    pub camera_corners: [Vec3<f64>; 8],
    /// Pixel positions of the corners in front of the near plane.
    pub pixels: [Option<Point2>; 8],
    /// Convex hull of the valid projected corners.
    pub hull: Vec<Point2>,
}

/// Projects the instance; `None` when no corner is in front of the near plane.
pub fn project_box<'a>(instance: &'a Instance, ego: &EgoPose, cam: &CameraRig, z_near: f64) -> Option<ProjectedBox<'a>> {
    let corners = box_corners(instance);
    let camera_corners = corners.corners.map(|c| world_to_camera(&c, ego, cam));
    let pixels = camera_corners.map(|c| project_with_near(&c, cam, z_near).pixel());
    let valid: Vec<Point2> = pixels.iter().flatten().copied().collect();
    if valid.is_empty() {
        return None;
    }
    let depth = world_to_camera(&instance.center, ego, cam).z();
    Some(ProjectedBox { instance, depth, camera_corners, pixels, hull: convex_hull(&valid) })
}

/// Back-to-front draw order: farther first; on equal depth the lower
/// track id is drawn later and so ends up on top.
pub fn painter_order(a: &ProjectedBox<'_>, b: &ProjectedBox<'_>) -> Ordering {
    b.depth
        .total_cmp(&a.depth)
        .then_with(|| b.instance.track_id.cmp(&a.instance.track_id))
}

pub fn sort_back_to_front(boxes: &mut [ProjectedBox<'_>]) {
    boxes.sort_by(painter_order);
}
