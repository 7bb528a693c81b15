use serde::{Deserialize, Serialize};

use super::config::CompileConfig;
use crate::noise::{DEFAULT_BETA_END, DEFAULT_BETA_START, DEFAULT_STEPS};
use crate::palette::Palette;
use crate::rng::derive_seed;
use crate::scene::{Scene, SCENE_FORMAT};
use crate::tensor_file::MAGIC;

pub const MANIFEST_FORMAT: &str = "physica-manifest/1";

/// Every seed the run drew parameters from, derived from `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTable {
    pub base: u64,
    pub e_cam: u64,
    pub mlp_p: u64,
    pub mlp_b: u64,
    pub class_table: u64,
    pub attn_vehicle: u64,
    pub attn_condition: u64,
    pub patch_map: u64,
    pub patch_boxes: u64,
    pub patch_world: u64,
}

impl SeedTable {
    pub fn new(base: u64) -> Self {
        let s = |label| derive_seed(base, label);
        Self {
            base,
            e_cam: s("e_cam"),
            mlp_p: s("mlp_p"),
            mlp_b: s("mlp_b"),
            class_table: s("class_table"),
            attn_vehicle: s("attn_vehicle"),
            attn_condition: s("attn_condition"),
            patch_map: s("patch_map"),
            patch_boxes: s("patch_boxes"),
            patch_world: s("patch_world"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// How rasters become attention tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenPlan {
    /// Spatial reduction standing in for a video autoencoder, e.g. `pool8`.
    pub reduction: String,
    pub patch: usize,
    pub token_dim: usize,
    pub pooled_height: usize,
    pub pooled_width_per_view: usize,
    pub tokens_per_frame: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSummary {
    pub scene_id: String,
    pub frames: usize,
    pub cameras: Vec<String>,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteSummary {
    pub sha256: String,
    pub objects: String,
    pub roads: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Formats {
    pub scene: String,
    pub tensor: String,
    pub png: String,
    pub flow_encoding: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDefaults {
    pub schedule: String,
    pub steps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
}

/// `manifest.json`: the resolved configuration plus content hashes of every
/// emitted file. Contains nothing that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub generator: String,
    pub scene: SceneSummary,
    pub config: CompileConfig,
    pub seeds: SeedTable,
    pub palette: PaletteSummary,
    pub formats: Formats,
    pub tokens: TokenPlan,
    pub noise: NoiseDefaults,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights_sha256: Option<String>,
    pub files: Vec<FileRecord>,
}

impl Manifest {
    #[allow(clippy::too_many_arguments)]
    pub(super) fn new(
        scene: &Scene,
        scene_sha256: String,
        config: CompileConfig,
        seeds: SeedTable,
        palette: &Palette,
        tokens: TokenPlan,
        weights_sha256: Option<String>,
        files: Vec<FileRecord>,
    ) -> Self {
        Self {
            format: MANIFEST_FORMAT.into(),
            generator: format!("physica {}", env!("CARGO_PKG_VERSION")),
            scene: SceneSummary {
                scene_id: scene.scene_id.clone(),
                frames: scene.frames.len(),
                cameras: scene.cameras.iter().map(|c| c.name.clone()).collect(),
                sha256: scene_sha256,
            },
            seeds,
            palette: PaletteSummary {
                sha256: palette.sha256(),
                objects: Palette::legend_text(&palette.objects),
                roads: Palette::legend_text(&palette.roads),
            },
            formats: Formats {
                scene: SCENE_FORMAT.into(),
                tensor: String::from_utf8_lossy(MAGIC).into_owned(),
                png: "8-bit RGB, non-interlaced".into(),
                flow_encoding: format!("floor(255*(clamp(c,-o_max,o_max)/o_max+1)/2+0.5), o_max={}", config.o_max),
            },
            config,
            tokens,
            noise: NoiseDefaults {
                schedule: "linear".into(),
                steps: DEFAULT_STEPS,
                beta_start: DEFAULT_BETA_START,
                beta_end: DEFAULT_BETA_END,
            },
            weights_sha256,
            files,
        }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
