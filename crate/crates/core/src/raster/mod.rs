//! Software rasterization shared by the flow and layout renderers.

mod image;
mod primitives;
mod projected;

pub use image::{Rgb, RgbImage};
pub use primitives::{convex_hull, fill_hull, hull_contains, segment_distance_sq, stroke_segment, Point2};
pub use projected::{painter_order, project_box, sort_back_to_front, ProjectedBox};
