//! Scene → condition bundle pipeline.
//!
//! Every (frame, camera) cell is rendered independently and written to its
//! own files, then each frame's rasters are tokenized and fused. No step
//! depends on scheduling, so output bytes are identical for any thread count.

mod config;
mod manifest;
mod overlay;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{CompileConfig, Precision};
pub use manifest::{FileRecord, Manifest, SeedTable, TokenPlan, MANIFEST_FORMAT};
pub use overlay::render_overlay;

use crate::embed::{ConditionEncoders, EmbedError, Linear};
use crate::flow::{compute_offsets, normalize_to_rgb, rasterize_flow_with, TrajectoryMap};
use crate::fusion::{embed_tokens, fuse_condition, fuse_vehicle, inflate_views, patchify, pool_image, AttentionParams, TokenGrid};
use crate::layout::{render_boxes, render_map};
use crate::matrix::Matrix;
use crate::palette::Palette;
use crate::png_io::encode_png;
use crate::rng::SplitMix64;
use crate::scalar::Real;
use crate::scene::{parse_scene_with, Scene, SceneError};
use crate::tensor_file::{TensorData, TensorEntry, TensorFile};

pub const EMBEDDINGS_FILE: &str = "embeddings.pct";
pub const FUSED_FILE: &str = "fused.pct";
pub const RAW_FLOW_FILE: &str = "flow_raw.pct";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("invalid scene: {0}")]
    Scene(#[from] SceneError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid weights: {0}")]
    Weights(String),
    #[error("{0}")]
    Input(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CompileError {
    /// Input problems map to exit code 1, I/O failures to 2.
    pub fn is_io(&self) -> bool {
        matches!(self, CompileError::Io { .. })
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CompileError::Io { path: path.to_path_buf(), source }
    }
}

impl From<EmbedError> for CompileError {
    fn from(e: EmbedError) -> Self {
        CompileError::Input(e.to_string())
    }
}

/// Rendered outputs of one (frame, camera) cell.
struct Cell {
    frame: usize,
    camera: usize,
    files: Vec<(String, Vec<u8>)>,
    flow_map: Option<TrajectoryMap>,
    pooled: [TokenGrid<f64>; 3],
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn tensor_data<T: Real>(values: &[T]) -> TensorData {
    if T::BYTES == 4 {
        TensorData::F32(values.iter().map(|v| v.to_f32().unwrap_or(f32::NAN)).collect())
    } else {
        TensorData::F64(values.iter().map(|v| v.to_f64_lossy()).collect())
    }
}

fn matrix_entry<T: Real>(name: String, m: &Matrix<T>) -> TensorEntry {
    TensorEntry::new(name, vec![m.rows() as u32, m.cols() as u32], tensor_data(m.as_slice()))
}

pub fn flow_png_name(camera: &str, frame: usize) -> String {
    format!("flow_{camera}_{frame:04}.png")
}

pub fn boxes_png_name(camera: &str, frame: usize) -> String {
    format!("boxes_{camera}_{frame:04}.png")
}

pub fn map_png_name(camera: &str, frame: usize) -> String {
    format!("map_{camera}_{frame:04}.png")
}

/// Outcome of a successful compile.
#[derive(Debug, Clone)]
pub struct CompileReport {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn compile_file(scene_path: &Path, out_dir: &Path, config: &CompileConfig) -> Result<CompileReport, CompileError> {
    let bytes = std::fs::read(scene_path).map_err(|e| CompileError::io(scene_path, e))?;
    compile_bytes(&bytes, out_dir, config)
}

pub fn compile_bytes(scene_bytes: &[u8], out_dir: &Path, config: &CompileConfig) -> Result<CompileReport, CompileError> {
    config.validate().map_err(CompileError::Config)?;
    let registry = config.registry();
    let scene = parse_scene_with(scene_bytes, &registry)?;
    let weights = match &config.weights {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CompileError::io(path, e))?;
            let file = TensorFile::from_bytes(&bytes).map_err(|f| CompileError::Weights(format!("{}: {f}", path.display())))?;
            Some((file, sha256_hex(&bytes)))
        }
        None => None,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| CompileError::io(out_dir, e))?;
    let manifest = match config.precision {
        Precision::F32 => run::<f32>(&scene, scene_bytes, out_dir, config, weights.as_ref()),
        Precision::F64 => run::<f64>(&scene, scene_bytes, out_dir, config, weights.as_ref()),
    }?;
    Ok(CompileReport { manifest, out_dir: out_dir.to_path_buf() })
}

/// Seeded linear patch embedders for the map, box and world rasters.
struct PatchEmbedders<T> {
    map: Linear<T>,
    boxes: Linear<T>,
    world: Linear<T>,
}

impl<T: Real> PatchEmbedders<T> {
    fn seeded(in_dim: usize, d: usize, seeds: &SeedTable) -> Self {
        Self {
            map: Linear::seeded(in_dim, d, &mut SplitMix64::new(seeds.patch_map)),
            boxes: Linear::seeded(in_dim, d, &mut SplitMix64::new(seeds.patch_boxes)),
            world: Linear::seeded(in_dim, d, &mut SplitMix64::new(seeds.patch_world)),
        }
    }
}

fn tokens<T: Real>(views: Vec<TokenGrid<f64>>, patch: usize, embedder: &Linear<T>) -> Result<Matrix<T>, CompileError> {
    let views: Vec<TokenGrid<T>> = views
        .into_iter()
        .map(|g| TokenGrid { t: g.t, h: g.h, w: g.w, c: g.c, layout: g.layout, data: g.data.into_iter().map(T::lit).collect() })
        .collect();
    let inflated = inflate_views(&views).map_err(|e| CompileError::Input(e.to_string()))?;
    embed_tokens(&patchify(&inflated, 0, patch), embedder).map_err(|e| CompileError::Input(e.to_string()))
}

fn render_cell(
    scene: &Scene,
    frame: usize,
    camera: usize,
    config: &CompileConfig,
    palette: &Palette,
    tracks: &[crate::flow::FlowTrack],
) -> Result<Cell, CompileError> {
    let registry = config.registry();
    let cam = &scene.cameras[camera];
    let flow_map = rasterize_flow_with(scene, tracks, frame, cam, config.flow_z_near);
    let flow = normalize_to_rgb(&flow_map, config.o_max).map_err(|e| CompileError::Config(e.to_string()))?;
    let boxes = render_boxes(scene, frame, cam, &config.box_style, palette);
    let map = render_map(scene, frame, cam, &config.map_style, &registry, palette);

    let png = |img, text: Vec<(&str, String)>| encode_png(img, &text).map_err(|e| CompileError::Input(e.to_string()));
    let files = vec![
        (flow_png_name(&cam.name, frame), png(&flow.image, vec![("o_max", format!("{}", config.o_max)), ("encoding", "rgb=floor(255*(clamp(c)/o_max+1)/2+0.5)".into())])?),
        (boxes_png_name(&cam.name, frame), png(&boxes.image, vec![("legend", boxes.legend_text())])?),
        (map_png_name(&cam.name, frame), png(&map.image, vec![("legend", map.legend_text())])?),
    ];
    let f = config.pool_factor;
    let pooled = [pool_image(&map.image, f), pool_image(&boxes.image, f), pool_image(&flow.image, f)];
    Ok(Cell { frame, camera, files, flow_map: config.write_raw_flow.then_some(flow_map), pooled })
}

fn write(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<FileRecord, CompileError> {
    let path = out_dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| CompileError::io(&path, e))?;
    Ok(FileRecord { path: name.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) })
}

fn run<T: Real>(
    scene: &Scene,
    scene_bytes: &[u8],
    out_dir: &Path,
    config: &CompileConfig,
    weights: Option<&(TensorFile, String)>,
) -> Result<Manifest, CompileError> {
    let registry = config.registry();
    let palette = Palette::for_registry(&registry);
    let seeds = SeedTable::new(config.seed);
    let d = config.d_model;

    let mut encoders = ConditionEncoders::<T>::seeded(&config.encoder(), &registry.objects, config.seed)?;
    if let (Some((file, _)), Some(path)) = (weights, &config.weights) {
        encoders.load_mlps(file, &path.display().to_string()).map_err(|e| CompileError::Weights(e.to_string()))?;
        let (cam_in, box_in) = (encoders.fourier.output_dim(21), encoders.fourier.output_dim(24));
        let expect = [("e_cam", &encoders.e_cam, cam_in), ("mlp_p", &encoders.mlp_p, box_in), ("mlp_b", &encoders.mlp_b, 2 * d)];
        for (name, mlp, input) in expect {
            if mlp.in_dim() != input || mlp.out_dim() != d {
                return Err(CompileError::Weights(format!("{name} must map {input} → {d}, got {} → {}", mlp.in_dim(), mlp.out_dim())));
            }
        }
    }
    let attn_vehicle = AttentionParams::<T>::seeded(d, seeds.attn_vehicle);
    let attn_condition = AttentionParams::<T>::seeded(d, seeds.attn_condition);
    let token_dim = config.patch * config.patch * 3;
    let embedders = PatchEmbedders::<T>::seeded(token_dim, d, &seeds);

    let tracks = compute_offsets(scene);
    let (frames, views) = (scene.frames.len(), scene.cameras.len());
    log::debug!("rendering {} cells", frames * views);
    let mut cells: Vec<Cell> = (0..frames * views)
        .into_par_iter()
        .map(|k| render_cell(scene, k / views, k % views, config, &palette, &tracks))
        .collect::<Result<_, _>>()?;

    let mut records: Vec<FileRecord> = cells
        .par_iter()
        .flat_map_iter(|c| c.files.iter().map(|(name, bytes)| write(out_dir, name, bytes)))
        .collect::<Result<_, _>>()?;

    let h_c = encoders.embed_cameras(&scene.cameras)?;
    let mut embeddings = TensorFile::new();
    embeddings.push(matrix_entry("h_c".into(), &h_c));
    let mut fused = TensorFile::new();
    let mut tokens_per_frame = 0;

    log::debug!("fusing {frames} frames");
    let per_frame: Vec<(Matrix<T>, Matrix<T>, Matrix<T>)> = (0..frames)
        .into_par_iter()
        .map(|fi| {
            let frame_cells = &cells[fi * views..(fi + 1) * views];
            debug_assert!(frame_cells.iter().enumerate().all(|(v, c)| c.frame == fi && c.camera == v));
            let pick = |kind: usize| frame_cells.iter().map(|c| c.pooled[kind].clone()).collect::<Vec<_>>();
            let h_map = tokens(pick(0), config.patch, &embedders.map)?;
            let h_box = tokens(pick(1), config.patch, &embedders.boxes)?;
            let h_world = tokens(pick(2), config.patch, &embedders.world)?;
            let h_coor = encoders.embed_frame_boxes(scene, fi)?;
            let fusion_err = |e: crate::fusion::FusionError| CompileError::Input(e.to_string());
            let h_vehicle = fuse_vehicle(&h_map, &h_box, &h_coor, &attn_vehicle).map_err(fusion_err)?;
            let h_condition = fuse_condition(&h_vehicle, &h_c, &h_world, &attn_condition).map_err(fusion_err)?;
            Ok((h_coor, h_vehicle, h_condition))
        })
        .collect::<Result<_, CompileError>>()?;
    for (fi, (h_coor, h_vehicle, h_condition)) in per_frame.iter().enumerate() {
        tokens_per_frame = h_vehicle.rows();
        embeddings.push(matrix_entry(format!("h_coor.{fi:04}"), h_coor));
        fused.push(matrix_entry(format!("h_vehicle.{fi:04}"), h_vehicle));
        fused.push(matrix_entry(format!("h_condition.{fi:04}"), h_condition));
    }
    records.push(write(out_dir, EMBEDDINGS_FILE, &embeddings.to_bytes())?);
    records.push(write(out_dir, FUSED_FILE, &fused.to_bytes())?);

    if config.write_raw_flow {
        let mut raw = TensorFile::new();
        for c in cells.iter_mut() {
            let map = c.flow_map.take().expect("raw flow requested");
            let name = format!("h_i.{}.{:04}", scene.cameras[c.camera].name, c.frame);
            raw.push(TensorEntry::new(name, vec![map.height, map.width, 3], TensorData::F64(map.flatten())));
        }
        records.push(write(out_dir, RAW_FLOW_FILE, &raw.to_bytes())?);
    }
    records.sort_by(|a, b| a.path.cmp(&b.path));

    let pooled_view = cells.first().map(|c| (c.pooled[0].h, c.pooled[0].w)).unwrap_or((0, 0));
    let manifest = Manifest::new(
        scene,
        sha256_hex(scene_bytes),
        config.clone(),
        seeds,
        &palette,
        TokenPlan {
            reduction: format!("pool{}", config.pool_factor),
            patch: config.patch,
            token_dim,
            pooled_height: pooled_view.0,
            pooled_width_per_view: pooled_view.1,
            tokens_per_frame,
        },
        weights.map(|(_, hash)| hash.clone()),
        records,
    );
    let text = manifest.to_json();
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, text).map_err(|e| CompileError::io(&path, e))?;
    Ok(manifest)
}

/// Parses the scene and returns it with the compile-time registry applied.
pub fn load_scene(scene_bytes: &[u8], config: &CompileConfig) -> Result<Scene, CompileError> {
    Ok(parse_scene_with(scene_bytes, &config.registry())?)
}
