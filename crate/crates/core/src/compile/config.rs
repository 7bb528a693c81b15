use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::embed::{EncoderConfig, PoseScaling};
use crate::flow::DEFAULT_O_MAX;
use crate::geometry::{FourierSpec, Z_NEAR};
use crate::layout::{BoxStyle, MapStyle};
use crate::scene::ClassRegistry;

/// Floating-point type used for embeddings and fused tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

impl Precision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }
}

/// Everything that influences compiled bytes. Serialized verbatim into the
/// manifest so a run can be reproduced from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileConfig {
    /// Flow channel bound in meters per frame.
    pub o_max: f64,
    pub fourier_frequencies: usize,
    pub d_model: usize,
    pub hidden_mult: usize,
    pub seed: u64,
    pub precision: Precision,
    pub pose_scaling: PoseScaling,
    pub box_coord_scale: f64,
    /// Spatial reduction applied to rasters before tokenization.
    pub pool_factor: usize,
    /// Side of the square token patches taken from the pooled grid.
    pub patch: usize,
    pub flow_z_near: f64,
    pub box_style: BoxStyle,
    pub map_style: MapStyle,
    /// Also write the unquantized trajectory maps.
    pub write_raw_flow: bool,
    /// Tensor file holding `e_cam`, `mlp_p` and `mlp_b` blocks that replace
    /// the seeded MLPs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registry: Option<ClassRegistry>,
}

impl Default for CompileConfig {
    fn default() -> Self {
        Self {
            o_max: DEFAULT_O_MAX,
            fourier_frequencies: FourierSpec::DEFAULT_FREQUENCIES,
            d_model: 64,
            hidden_mult: 4,
            seed: 0,
            precision: Precision::F32,
            pose_scaling: PoseScaling::default(),
            box_coord_scale: 100.0,
            pool_factor: 8,
            patch: 2,
            flow_z_near: Z_NEAR,
            box_style: BoxStyle::default(),
            map_style: MapStyle::default(),
            write_raw_flow: false,
            weights: None,
            registry: None,
        }
    }
}

impl CompileConfig {
    pub fn encoder(&self) -> EncoderConfig {
        EncoderConfig {
            d_model: self.d_model,
            fourier_frequencies: self.fourier_frequencies,
            hidden_mult: self.hidden_mult,
            pose_scaling: self.pose_scaling,
            box_coord_scale: self.box_coord_scale,
        }
    }

    pub fn registry(&self) -> ClassRegistry {
        self.registry.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.o_max > 0.0 && self.o_max.is_finite()) {
            return Err(format!("o_max must be positive, got {}", self.o_max));
        }
        if self.d_model == 0 || self.hidden_mult == 0 {
            return Err("d_model and hidden_mult must be positive".into());
        }
        if self.fourier_frequencies == 0 || self.fourier_frequencies > 52 {
            return Err(format!("fourier_frequencies must be in 1..=52, got {}", self.fourier_frequencies));
        }
        if self.pool_factor == 0 || self.patch == 0 {
            return Err("pool_factor and patch must be positive".into());
        }
        if !(self.box_coord_scale > 0.0 && self.box_coord_scale.is_finite()) {
            return Err("box_coord_scale must be positive".into());
        }
        for (name, z) in [("flow_z_near", self.flow_z_near), ("box_style.z_near", self.box_style.z_near), ("map_style.z_near", self.map_style.z_near)] {
            if !(z > 0.0 && z.is_finite()) {
                return Err(format!("{name} must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.box_style.fill_alpha) {
            return Err("box_style.fill_alpha must be in [0, 1]".into());
        }
        Ok(())
    }
}
