//! Vehicle-frame layout rasters: depth-ordered box projections and road
//! map projections.

use serde::{Deserialize, Serialize};

use crate::geometry::{clip_segment_near, project_with_near, world_to_camera, BOX_EDGES, Z_NEAR};
use crate::palette::Palette;
use crate::raster::{fill_hull, project_box, sort_back_to_front, stroke_segment, Point2, Rgb, RgbImage};
use crate::scene::{CameraRig, ClassRegistry, EgoPose, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoxStyle {
    /// Hull fill opacity over prior content; 0 disables the fill.
    pub fill_alpha: f64,
    /// Draw the 12 box edges at full intensity after the fill.
    pub wireframe: bool,
    pub line_width: f64,
    pub z_near: f64,
}

impl Default for BoxStyle {
    fn default() -> Self {
        Self { fill_alpha: 1.0, wireframe: false, line_width: 1.0, z_near: Z_NEAR }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapStyle {
    pub line_width: f64,
    pub z_near: f64,
}

impl Default for MapStyle {
    fn default() -> Self {
        Self { line_width: 2.0, z_near: Z_NEAR }
    }
}

/// A layout raster together with the legend its colors come from.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutRaster {
    pub frame: usize,
    pub camera: String,
    pub image: RgbImage,
    pub legend: Vec<(String, Rgb)>,
}

pub type BoxRaster = LayoutRaster;
pub type MapRaster = LayoutRaster;

impl LayoutRaster {
    pub fn legend_text(&self) -> String {
        Palette::legend_text(&self.legend)
    }
}

pub fn render_boxes(scene: &Scene, frame: usize, cam: &CameraRig, style: &BoxStyle, palette: &Palette) -> BoxRaster {
    let mut image = RgbImage::new(cam.width, cam.height);
    draw_boxes(&mut image, scene, frame, cam, style, palette);
    LayoutRaster { frame, camera: cam.name.clone(), image, legend: palette.objects.clone() }
}

/// Painter's algorithm over `canvas`: boxes sorted far to near by center
/// depth, each filled then optionally outlined.
pub fn draw_boxes(canvas: &mut RgbImage, scene: &Scene, frame: usize, cam: &CameraRig, style: &BoxStyle, palette: &Palette) {
    let Some(f) = scene.frames.get(frame) else {
        return;
    };
    let mut boxes: Vec<_> = f.instances.iter().filter_map(|inst| project_box(inst, &f.ego, cam, style.z_near)).collect();
    sort_back_to_front(&mut boxes);
    for b in &boxes {
        // Unknown labels are rejected by validation; fall back to white.
        let color = palette.object_color(&b.instance.class_label).unwrap_or([255, 255, 255]);
        if style.fill_alpha > 0.0 {
            fill_hull(&b.hull, cam.width, cam.height, |x, y| canvas.blend(x, y, color, style.fill_alpha));
        }
        if style.wireframe {
            for &(i, j) in &BOX_EDGES {
                if let Some((p, q)) = clip_segment_near(b.camera_corners[i], b.camera_corners[j], style.z_near) {
                    let (pa, pb) = (project_with_near(&p, cam, style.z_near), project_with_near(&q, cam, style.z_near));
                    if let (Some(a), Some(c)) = (pa.pixel(), pb.pixel()) {
                        stroke_segment(a, c, style.line_width, cam.width, cam.height, |x, y| canvas.put(x, y, color));
                    }
                }
            }
        }
    }
}

/// Camera-frame segments of a polyline, clipped to the near plane and
/// projected to pixels.
pub fn project_polyline(
    points: &[crate::geometry::Vec3<f64>],
    closed: bool,
    ego: &EgoPose,
    cam: &CameraRig,
    z_near: f64,
) -> Vec<(Point2, Point2)> {
    let cam_pts: Vec<_> = points.iter().map(|p| world_to_camera(p, ego, cam)).collect();
    let mut pairs: Vec<(usize, usize)> = (1..cam_pts.len()).map(|i| (i - 1, i)).collect();
    if closed && cam_pts.len() >= 3 {
        pairs.push((cam_pts.len() - 1, 0));
    }
    pairs
        .into_iter()
        .filter_map(|(i, j)| {
            let (a, b) = clip_segment_near(cam_pts[i], cam_pts[j], z_near)?;
            let pa = project_with_near(&a, cam, z_near).pixel()?;
            let pb = project_with_near(&b, cam, z_near).pixel()?;
            Some((pa, pb))
        })
        .collect()
}

pub fn render_map(
    scene: &Scene,
    frame: usize,
    cam: &CameraRig,
    style: &MapStyle,
    registry: &ClassRegistry,
    palette: &Palette,
) -> MapRaster {
    let mut image = RgbImage::new(cam.width, cam.height);
    if let Some(f) = scene.frames.get(frame) {
        for el in &scene.map {
            let color = palette.road_color(&el.kind).unwrap_or([255, 255, 255]);
            let closed = registry.road(&el.kind).is_some_and(|r| r.closed);
            for (a, b) in project_polyline(&el.polyline, closed, &f.ego, cam, style.z_near) {
                stroke_segment(a, b, style.line_width, cam.width, cam.height, |x, y| image.put(x, y, color));
            }
        }
    }
    LayoutRaster { frame, camera: cam.name.clone(), image, legend: palette.roads.clone() }
}

/// Boxes drawn over an already rendered map raster.
pub fn composite_boxes_over_map(
    map: &MapRaster,
    scene: &Scene,
    frame: usize,
    cam: &CameraRig,
    style: &BoxStyle,
    palette: &Palette,
) -> RgbImage {
    let mut canvas = map.image.clone();
    draw_boxes(&mut canvas, scene, frame, cam, style, palette);
    canvas
}
