//! Camera-pose and box-coordinate embeddings.
//!
//! The camera embedding stacks the columns of K, R and T into a 7×3 matrix,
//! Fourier-embeds it and maps it through an MLP. Each box embeds its eight
//! vehicle-frame corners the same way and combines the result with a class
//! vector in a second MLP.
//!
//! Class vectors are seeded unit-norm rows keyed by label, standing in for
//! pooled text-encoder features of the class names.

mod mlp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mlp::{gelu, Linear, MlpParams, Provenance};

use crate::geometry::{box_corners, fourier_embed, world_to_vehicle, FourierSpec};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, SplitMix64};
use crate::scalar::Real;
use crate::scene::{CameraRig, EgoPose, Instance, Scene};
use crate::tensor_file::TensorFile;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("input dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("unknown class label {0:?}")]
    UnknownClass(String),
    #[error("bad parameter shape: {0}")]
    BadShape(String),
    #[error("non-finite parameters in {0}")]
    NonFinite(String),
    #[error("missing tensor {0}")]
    MissingTensor(String),
}

/// Normalization applied to camera parameters before the Fourier embedding.
/// Rotation entries are already bounded and pass through unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoseScaling {
    /// Divide the intrinsics by the image width.
    pub intrinsics_by_width: bool,
    /// Meters; translation is divided by this.
    pub translation_scale: f64,
}

impl Default for PoseScaling {
    fn default() -> Self {
        Self { intrinsics_by_width: true, translation_scale: 100.0 }
    }
}

impl PoseScaling {
    pub fn none() -> Self {
        Self { intrinsics_by_width: false, translation_scale: 1.0 }
    }
}

/// Rows are the columns of K, then the columns of R, then T.
pub fn build_pbar<T: Real>(cam: &CameraRig, scaling: &PoseScaling) -> [[T; 3]; 7] {
    let k = if scaling.intrinsics_by_width { cam.intrinsics.scale(1.0 / cam.width as f64) } else { cam.intrinsics };
    let t = cam.translation.scale(1.0 / scaling.translation_scale);
    let mut rows = [[T::zero(); 3]; 7];
    for c in 0..3 {
        rows[c] = k.col(c).0.map(T::lit);
        rows[3 + c] = cam.rotation.col(c).0.map(T::lit);
    }
    rows[6] = t.0.map(T::lit);
    rows
}

/// Seeded unit-norm class vectors, one per label.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEmbeddingTable<T> {
    labels: Vec<String>,
    rows: Vec<Vec<T>>,
}

impl<T: Real> ClassEmbeddingTable<T> {
    /// Each row is an independent stream keyed by `(seed, label)`: `dim`
    /// standard normals scaled to unit length, so adding or reordering labels
    /// never changes another label's vector.
    pub fn seeded<S: AsRef<str>>(labels: &[S], dim: usize, seed: u64) -> Self {
        let rows = labels
            .iter()
            .map(|l| {
                let mut rng = SplitMix64::keyed(seed, l.as_ref());
                let v: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| T::lit(x / norm)).collect()
            })
            .collect();
        Self { labels: labels.iter().map(|l| l.as_ref().to_string()).collect(), rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, label: &str) -> Result<&[T], EmbedError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.rows[i].as_slice())
            .ok_or_else(|| EmbedError::UnknownClass(label.to_string()))
    }
}

/// Fourier features of the flattened 7×3 camera matrix.
pub fn camera_features<T: Real>(cam: &CameraRig, spec: &FourierSpec, scaling: &PoseScaling) -> Vec<T> {
    let pbar = build_pbar::<T>(cam, scaling);
    let flat: Vec<T> = pbar.iter().flatten().copied().collect();
    fourier_embed(&flat, spec)
}

pub fn embed_camera<T: Real>(
    cam: &CameraRig,
    e_cam: &MlpParams<T>,
    spec: &FourierSpec,
    scaling: &PoseScaling,
) -> Result<Vec<T>, EmbedError> {
    e_cam.forward(&camera_features(cam, spec, scaling))
}

/// Fourier features of the eight box corners in the ego vehicle frame.
pub fn box_features<T: Real>(instance: &Instance, ego: &EgoPose, spec: &FourierSpec, coord_scale: f64) -> Vec<T> {
    let corners = box_corners(instance).map(|c| world_to_vehicle(c, ego));
    let flat: Vec<T> = corners.flatten().iter().map(|&v| T::lit(v / coord_scale)).collect();
    fourier_embed(&flat, spec)
}

/// All seeded or loaded parameters of the embedding stage.
#[derive(Debug, Clone)]
pub struct ConditionEncoders<T> {
    pub e_cam: MlpParams<T>,
    pub mlp_p: MlpParams<T>,
    pub mlp_b: MlpParams<T>,
    pub classes: ClassEmbeddingTable<T>,
    pub fourier: FourierSpec,
    pub pose_scaling: PoseScaling,
    /// Meters; box corners are divided by this before the Fourier embedding.
    pub box_coord_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncoderConfig {
    pub d_model: usize,
    pub fourier_frequencies: usize,
    /// Hidden width as a multiple of `d_model`.
    pub hidden_mult: usize,
    pub pose_scaling: PoseScaling,
    pub box_coord_scale: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            d_model: 64,
            fourier_frequencies: FourierSpec::DEFAULT_FREQUENCIES,
            hidden_mult: 4,
            pose_scaling: PoseScaling::default(),
            box_coord_scale: 100.0,
        }
    }
}

impl<T: Real> ConditionEncoders<T> {
    pub fn seeded<S: AsRef<str>>(config: &EncoderConfig, class_labels: &[S], seed: u64) -> Result<Self, EmbedError> {
        let fourier = FourierSpec::new(config.fourier_frequencies.max(1));
        let d = config.d_model;
        let hidden = config.hidden_mult * d;
        Ok(Self {
            e_cam: MlpParams::seeded(&[fourier.output_dim(21), hidden, d], derive_seed(seed, "e_cam"))?,
            mlp_p: MlpParams::seeded(&[fourier.output_dim(24), hidden, d], derive_seed(seed, "mlp_p"))?,
            mlp_b: MlpParams::seeded(&[2 * d, hidden, d], derive_seed(seed, "mlp_b"))?,
            classes: ClassEmbeddingTable::seeded(class_labels, d, derive_seed(seed, "class_table")),
            fourier,
            pose_scaling: config.pose_scaling,
            box_coord_scale: config.box_coord_scale,
        })
    }

    /// Replaces the MLPs with blocks named `e_cam`, `mlp_p` and `mlp_b` from
    /// a weight file.
    pub fn load_mlps(&mut self, file: &TensorFile, origin: &str) -> Result<(), EmbedError> {
        self.e_cam = MlpParams::from_tensor_file(file, "e_cam", origin)?;
        self.mlp_p = MlpParams::from_tensor_file(file, "mlp_p", origin)?;
        self.mlp_b = MlpParams::from_tensor_file(file, "mlp_b", origin)?;
        Ok(())
    }

    pub fn d_model(&self) -> usize {
        self.mlp_b.out_dim()
    }

    pub fn embed_camera(&self, cam: &CameraRig) -> Result<Vec<T>, EmbedError> {
        embed_camera(cam, &self.e_cam, &self.fourier, &self.pose_scaling)
    }

    /// `V × d_model` camera embeddings in rig order.
    pub fn embed_cameras(&self, cams: &[CameraRig]) -> Result<Matrix<T>, EmbedError> {
        let rows = cams.iter().map(|c| self.embed_camera(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(rows_to_matrix(rows, self.e_cam.out_dim()))
    }

    pub fn embed_box(&self, instance: &Instance, ego: &EgoPose) -> Result<Vec<T>, EmbedError> {
        embed_box(instance, ego, &self.classes, &self.mlp_p, &self.mlp_b, &self.fourier, self.box_coord_scale)
    }

    /// `N_t × d_model`, one row per instance in ascending track id order.
    pub fn embed_frame_boxes(&self, scene: &Scene, frame: usize) -> Result<Matrix<T>, EmbedError> {
        let f = &scene.frames[frame];
        let mut order: Vec<&Instance> = f.instances.iter().collect();
        order.sort_by_key(|i| i.track_id);
        let rows = order.iter().map(|inst| self.embed_box(inst, &f.ego)).collect::<Result<Vec<_>, _>>()?;
        Ok(rows_to_matrix(rows, self.d_model()))
    }
}

fn rows_to_matrix<T: Real>(rows: Vec<Vec<T>>, cols: usize) -> Matrix<T> {
    let n = rows.len();
    Matrix::from_vec(n, cols, rows.into_iter().flatten().collect())
}

/// `mlp_b(concat(class_vector, mlp_p(fourier(corners))))`.
pub fn embed_box<T: Real>(
    instance: &Instance,
    ego: &EgoPose,
    table: &ClassEmbeddingTable<T>,
    mlp_p: &MlpParams<T>,
    mlp_b: &MlpParams<T>,
    spec: &FourierSpec,
    coord_scale: f64,
) -> Result<Vec<T>, EmbedError> {
    let class = table.get(&instance.class_label)?;
    let position = mlp_p.forward(&box_features(instance, ego, spec, coord_scale))?;
    let mut joint = Vec::with_capacity(class.len() + position.len());
    joint.extend_from_slice(class);
    joint.extend_from_slice(&position);
    mlp_b.forward(&joint)
}
