//! Condition compiler for multi-view driving scenes.
//!
//! Turns scene layouts (3D boxes, ego poses, camera rigs, road maps) into
//! conditioning artifacts for video generation models: instance-flow maps,
//! occlusion-ordered layout rasters, camera and box Fourier embeddings,
//! fused condition tensors and synthetic long-tail scenarios.

pub mod compile;
pub mod embed;
pub mod flow;
pub mod fusion;
pub mod geometry;
pub mod layout;
pub mod matrix;
pub mod noise;
pub mod palette;
pub mod png_io;
pub mod raster;
pub mod rng;
pub mod scalar;
pub mod scenario;
pub mod scene;
pub mod tensor_file;

pub use scalar::Real;

pub type Vec3f = geometry::Vec3<f32>;
pub type Vec3d = geometry::Vec3<f64>;
pub type Mat3f = geometry::Mat3<f32>;
pub type Mat3d = geometry::Mat3<f64>;
pub type Matrix32 = matrix::Matrix<f32>;
pub type Matrix64 = matrix::Matrix<f64>;
pub type MlpParams32 = embed::MlpParams<f32>;
pub type MlpParams64 = embed::MlpParams<f64>;
pub type AttentionParams32 = fusion::AttentionParams<f32>;
pub type AttentionParams64 = fusion::AttentionParams<f64>;
pub type TokenGrid32 = fusion::TokenGrid<f32>;
pub type TokenGrid64 = fusion::TokenGrid<f64>;
pub type NoiseSchedule32 = noise::NoiseSchedule<f32>;
pub type NoiseSchedule64 = noise::NoiseSchedule<f64>;
pub type ConditionEncoders32 = embed::ConditionEncoders<f32>;
pub type ConditionEncoders64 = embed::ConditionEncoders<f64>;
