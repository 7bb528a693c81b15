//! In-memory and on-disk representation of driving scenes.

mod json;
mod registry;
mod types;
mod validate;

#[doc(hidden)]
pub mod test_support;

pub use json::{parse_scene, parse_scene_with, parse_unvalidated, serialize_scene, SceneError, SCENE_FORMAT};
pub use registry::{ClassRegistry, RoadClass, DEFAULT_OBJECT_CLASSES, DEFAULT_ROAD_CLASSES};
pub use types::{CameraRig, EgoPose, Frame, Instance, MapElement, Scene};
pub use validate::{validate_scene, validate_scene_with, Severity, Violation, ViolationCode, ROTATION_TOLERANCE};
