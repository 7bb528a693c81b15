//! Forward-only condition fusion: cross-attention, the vehicle and
//! condition fusion, and view inflation.

mod attention;
mod tokens;

use thiserror::Error;

pub use attention::{
    attention_weights, cross_attention, cross_attention_with, fuse_condition, fuse_vehicle, AttentionParams, Summation,
};
pub use tokens::{deinflate_views, embed_tokens, inflate_views, patchify, pool_image, GridLayout, TokenGrid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FusionError {
    #[error("cross-attention needs at least one key/value token")]
    EmptyKeys,
    #[error("{what}: expected {expected}, got {actual}")]
    DimMismatch { what: &'static str, expected: usize, actual: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
}
