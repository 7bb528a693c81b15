use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::registry::ClassRegistry;
use super::types::Scene;

/// Orthonormality tolerance for rotation matrices.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    SceneNoFrames,
    SceneNoCameras,
    SceneFrameRateNonPositive,
    FrameIndexMismatch,
    FrameTimestampNotIncreasing,
    FrameDuplicateTrackId,
    EgoRNotOrthonormal,
    InstSizeNonPositive,
    InstUnknownClass,
    CamRNotOrthonormal,
    CamKInvalid,
    CamNameInvalid,
    CamNameDuplicate,
    ImgDimZero,
    ImgDimNotDiv8,
    MapUnknownKind,
    MapPolylineTooShort,
    MapRepeatedPoint,
    NonFiniteValue,
    TrackNotContiguous,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        use ViolationCode::*;
        match self {
            SceneNoFrames => "SCENE_NO_FRAMES",
            SceneNoCameras => "SCENE_NO_CAMERAS",
            SceneFrameRateNonPositive => "SCENE_FRAME_RATE_NONPOSITIVE",
            FrameIndexMismatch => "FRAME_INDEX_MISMATCH",
            FrameTimestampNotIncreasing => "FRAME_TIMESTAMP_NOT_INCREASING",
            FrameDuplicateTrackId => "FRAME_DUPLICATE_TRACK_ID",
            EgoRNotOrthonormal => "EGO_R_NOT_ORTHONORMAL",
            InstSizeNonPositive => "INST_SIZE_NONPOSITIVE",
            InstUnknownClass => "INST_UNKNOWN_CLASS",
            CamRNotOrthonormal => "CAM_R_NOT_ORTHONORMAL",
            CamKInvalid => "CAM_K_INVALID",
            CamNameInvalid => "CAM_NAME_INVALID",
            CamNameDuplicate => "CAM_NAME_DUPLICATE",
            ImgDimZero => "IMG_DIM_ZERO",
            ImgDimNotDiv8 => "IMG_DIM_NOT_DIV8",
            MapUnknownKind => "MAP_UNKNOWN_KIND",
            MapPolylineTooShort => "MAP_POLYLINE_TOO_SHORT",
            MapRepeatedPoint => "MAP_REPEATED_POINT",
            NonFiniteValue => "NONFINITE_VALUE",
            TrackNotContiguous => "TRACK_NOT_CONTIGUOUS",
        }
    }

    /// Human description of the invariant the code guards.
    pub fn invariant(&self) -> &'static str {
        use ViolationCode::*;
        match self {
            SceneNoFrames => "frames non-empty",
            SceneNoCameras => "at least one camera",
            SceneFrameRateNonPositive => "frame_rate > 0",
            FrameIndexMismatch => "frame index equals its position",
            FrameTimestampNotIncreasing => "timestamps strictly increasing",
            FrameDuplicateTrackId => "track_ids unique",
            EgoRNotOrthonormal => "ego rotation orthonormal",
            InstSizeNonPositive => "size components > 0",
            InstUnknownClass => "class_label in registry",
            CamRNotOrthonormal => "camera rotation orthonormal",
            CamKInvalid => "intrinsics fx, fy > 0 with zero skew",
            CamNameInvalid => "camera name non-empty and filename-safe",
            CamNameDuplicate => "camera names unique",
            ImgDimZero => "image dimensions non-zero",
            ImgDimNotDiv8 => "image dimensions divisible by 8",
            MapUnknownKind => "map kind in registry",
            MapPolylineTooShort => "polyline has at least 2 points",
            MapRepeatedPoint => "consecutive polyline points distinct",
            NonFiniteValue => "all numbers finite",
            TrackNotContiguous => "track frames contiguous",
        }
    }

    pub fn severity(&self) -> Severity {
        match self {
            ViolationCode::TrackNotContiguous => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// JSON-path style location, e.g. `frames[3].instances[0].size`.
    pub location: String,
}

impl Violation {
    fn new(code: ViolationCode, location: impl Into<String>) -> Self {
        Self { code, location: location.into() }
    }

    pub fn severity(&self) -> Severity {
        self.code.severity()
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} ({})", self.code, self.location, self.code.invariant())
    }
}

pub fn validate_scene(scene: &Scene) -> Vec<Violation> {
    validate_scene_with(scene, &ClassRegistry::default())
}

/// Checks every scene invariant. The result is empty iff the scene is valid;
/// warning-severity entries do not make a scene unusable.
pub fn validate_scene_with(scene: &Scene, registry: &ClassRegistry) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();
    let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());

    if !scene.frame_rate.is_finite() {
        out.push(Violation::new(NonFiniteValue, "frame_rate"));
    } else if scene.frame_rate <= 0.0 {
        out.push(Violation::new(SceneFrameRateNonPositive, "frame_rate"));
    }
    if scene.frames.is_empty() {
        out.push(Violation::new(SceneNoFrames, "frames"));
    }
    if scene.cameras.is_empty() {
        out.push(Violation::new(SceneNoCameras, "cameras"));
    }

    let mut names = HashSet::new();
    for (c, cam) in scene.cameras.iter().enumerate() {
        let at = |field: &str| format!("cameras[{c}].{field}");
        let safe = !cam.name.is_empty()
            && cam.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-');
        if !safe {
            out.push(Violation::new(CamNameInvalid, at("name")));
        } else if !names.insert(cam.name.as_str()) {
            out.push(Violation::new(CamNameDuplicate, at("name")));
        }
        if !cam.intrinsics.is_finite() {
            out.push(Violation::new(NonFiniteValue, at("intrinsics")));
        } else {
            let k = &cam.intrinsics.0;
            let ok = k[0][0] > 0.0
                && k[1][1] > 0.0
                && k[0][1] == 0.0
                && k[1][0] == 0.0
                && k[2] == [0.0, 0.0, 1.0];
            if !ok {
                out.push(Violation::new(CamKInvalid, at("intrinsics")));
            }
        }
        if !cam.rotation.is_finite() {
            out.push(Violation::new(NonFiniteValue, at("rotation")));
        } else if !cam.rotation.is_rotation(ROTATION_TOLERANCE) {
            out.push(Violation::new(CamRNotOrthonormal, at("rotation")));
        }
        if !cam.translation.is_finite() {
            out.push(Violation::new(NonFiniteValue, at("translation")));
        }
        for (field, dim) in [("width", cam.width), ("height", cam.height)] {
            if dim == 0 {
                out.push(Violation::new(ImgDimZero, at(field)));
            } else if dim % 8 != 0 {
                out.push(Violation::new(ImgDimNotDiv8, at(field)));
            }
        }
    }

    for (m, el) in scene.map.iter().enumerate() {
        if registry.road(&el.kind).is_none() {
            out.push(Violation::new(MapUnknownKind, format!("map[{m}].kind")));
        }
        if el.polyline.len() < 2 {
            out.push(Violation::new(MapPolylineTooShort, format!("map[{m}].polyline")));
        }
        for (p, pt) in el.polyline.iter().enumerate() {
            if !pt.is_finite() {
                out.push(Violation::new(NonFiniteValue, format!("map[{m}].polyline[{p}]")));
            } else if p > 0 && el.polyline[p - 1] == *pt {
                out.push(Violation::new(MapRepeatedPoint, format!("map[{m}].polyline[{p}]")));
            }
        }
    }

    let mut presence: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, frame) in scene.frames.iter().enumerate() {
        let at = |field: &str| format!("frames[{i}].{field}");
        if frame.index as usize != i {
            out.push(Violation::new(FrameIndexMismatch, at("index")));
        }
        if !frame.timestamp.is_finite() {
            out.push(Violation::new(NonFiniteValue, at("timestamp")));
        } else if i > 0 && !(frame.timestamp > scene.frames[i - 1].timestamp) {
            out.push(Violation::new(FrameTimestampNotIncreasing, at("timestamp")));
        }
        if !frame.ego.rotation.is_finite() {
            out.push(Violation::new(NonFiniteValue, at("ego.rotation")));
        } else if !frame.ego.rotation.is_rotation(ROTATION_TOLERANCE) {
            out.push(Violation::new(EgoRNotOrthonormal, at("ego.rotation")));
        }
        if !frame.ego.translation.is_finite() {
            out.push(Violation::new(NonFiniteValue, at("ego.translation")));
        }

        let mut seen = HashSet::new();
        for (j, inst) in frame.instances.iter().enumerate() {
            let at = |field: &str| format!("frames[{i}].instances[{j}].{field}");
            if !seen.insert(inst.track_id) {
                out.push(Violation::new(FrameDuplicateTrackId, at("track_id")));
            } else {
                presence.entry(inst.track_id).or_default().push(i);
            }
            if registry.object_index(&inst.class_label).is_none() {
                out.push(Violation::new(InstUnknownClass, at("class_label")));
            }
            if !inst.center.is_finite() {
                out.push(Violation::new(NonFiniteValue, at("center")));
            }
            if !finite(&inst.size.0) || !inst.yaw.is_finite() {
                out.push(Violation::new(NonFiniteValue, at("size")));
            } else if inst.size.0.iter().any(|&s| s <= 0.0) {
                out.push(Violation::new(InstSizeNonPositive, at("size")));
            }
        }
    }

    for (track, frames) in &presence {
        let contiguous = frames.windows(2).all(|w| w[1] == w[0] + 1);
        if !contiguous {
            out.push(Violation::new(TrackNotContiguous, format!("track {track}")));
        }
    }

    out
}
