//! The `physica-scene/1` JSON document format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::registry::ClassRegistry;
use super::types::{CameraRig, Frame, MapElement, Scene};
use super::validate::{validate_scene_with, Violation};

pub const SCENE_FORMAT: &str = "physica-scene/1";

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invariant violated: {}", .violations.first().map(|v| v.to_string()).unwrap_or_default())]
    Invariant { violations: Vec<Violation> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    format: String,
    scene_id: String,
    frame_rate: f64,
    cameras: Vec<CameraRig>,
    map: Vec<MapElement>,
    frames: Vec<Frame>,
}

pub fn parse_scene(bytes: &[u8]) -> Result<Scene, SceneError> {
    parse_scene_with(bytes, &ClassRegistry::default())
}

/// Parses and validates a scene document. Warning-level violations are
/// accepted; any error-level violation rejects the document.
pub fn parse_scene_with(bytes: &[u8], registry: &ClassRegistry) -> Result<Scene, SceneError> {
    let scene = parse_unvalidated(bytes)?;
    let violations: Vec<Violation> = validate_scene_with(&scene, registry)
        .into_iter()
        .filter(Violation::is_error)
        .collect();
    if violations.is_empty() {
        Ok(scene)
    } else {
        Err(SceneError::Invariant { violations })
    }
}

/// Syntax and schema checks only.
pub fn parse_unvalidated(bytes: &[u8]) -> Result<Scene, SceneError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let (line, column) = line_col(bytes, e.valid_up_to());
        SceneError::Syntax { line, column, message: "input is not valid UTF-8".into() }
    })?;
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: SceneDoc = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        classify(inner, Some(path))
    })?;
    de.end().map_err(|e| classify(e, None))?;
    if doc.format != SCENE_FORMAT {
        return Err(SceneError::Schema {
            path: "format".into(),
            message: format!("expected \"{SCENE_FORMAT}\", found \"{}\"", doc.format),
        });
    }
    Ok(Scene {
        scene_id: doc.scene_id,
        frame_rate: doc.frame_rate,
        cameras: doc.cameras,
        map: doc.map,
        frames: doc.frames,
    })
}

fn classify(err: serde_json::Error, path: Option<String>) -> SceneError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Data => SceneError::Schema {
            path: path.filter(|p| p != ".").unwrap_or_else(|| "$".into()),
            message: strip_position(&err),
        },
        _ => SceneError::Syntax { line: err.line(), column: err.column(), message: strip_position(&err) },
    }
}

fn strip_position(err: &serde_json::Error) -> String {
    let s = err.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

fn line_col(bytes: &[u8], offset: usize) -> (usize, usize) {
    let before = &bytes[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = offset - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Canonical text: sorted keys, two-space indentation, shortest round-trip
/// float formatting and a trailing newline.
pub fn serialize_scene(scene: &Scene) -> Vec<u8> {
    let doc = SceneDoc {
        format: SCENE_FORMAT.to_string(),
        scene_id: scene.scene_id.clone(),
        frame_rate: scene.frame_rate,
        cameras: scene.cameras.clone(),
        map: scene.map.clone(),
        frames: scene.frames.clone(),
    };
    // Routing through Value sorts object keys.
    let value = serde_json::to_value(&doc).expect("scene documents always serialize");
    let mut out = serde_json::to_vec_pretty(&value).expect("JSON values always serialize");
    out.push(b'\n');
    out
}
