use super::{CompileConfig, CompileError};
use crate::flow::{compute_offsets, normalize_to_rgb, rasterize_flow_with};
use crate::layout::{composite_boxes_over_map, render_map};
use crate::palette::Palette;
use crate::raster::RgbImage;
use crate::scene::Scene;

/// Map under boxes under the flow visualization. Flow is blended at
/// `alpha` only where an instance's flow was written; `alpha = 0` yields
/// exactly the boxes-over-map composite.
pub fn render_overlay(
    scene: &Scene,
    frame: usize,
    camera: usize,
    config: &CompileConfig,
    alpha: f64,
) -> Result<RgbImage, CompileError> {
    if frame >= scene.frames.len() {
        return Err(CompileError::Input(format!("frame {frame} out of range (scene has {})", scene.frames.len())));
    }
    let cam = scene
        .cameras
        .get(camera)
        .ok_or_else(|| CompileError::Input(format!("camera {camera} out of range (scene has {})", scene.cameras.len())))?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CompileError::Input(format!("alpha {alpha} must be in [0, 1]")));
    }
    let registry = config.registry();
    let palette = Palette::for_registry(&registry);
    let map = render_map(scene, frame, cam, &config.map_style, &registry, &palette);
    let mut canvas = composite_boxes_over_map(&map, scene, frame, cam, &config.box_style, &palette);
    if alpha > 0.0 {
        let traj = rasterize_flow_with(scene, &compute_offsets(scene), frame, cam, config.flow_z_near);
        let flow = normalize_to_rgb(&traj, config.o_max).map_err(|e| CompileError::Config(e.to_string()))?;
        for y in 0..cam.height {
            for x in 0..cam.width {
                if traj.coverage[(y * cam.width + x) as usize] {
                    canvas.blend(x, y, flow.image.get(x, y), alpha);
                }
            }
        }
    }
    Ok(canvas)
}
