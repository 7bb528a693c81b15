//! Independent reference implementations and generators shared by the
//! integration tests and the acceptance suite.
#![allow(dead_code)]

use physica_core::geometry::{Mat3, Vec3};
use physica_core::palette::Palette;
use physica_core::raster::RgbImage;
use physica_core::rng::SplitMix64;
use physica_core::scene::{CameraRig, ClassRegistry, EgoPose, Frame, Instance, Scene};

pub const FIXTURE_SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/fixture_scenario.json");
pub const FIXTURE_SCENE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/fixture_scene.json");
pub const FIXTURE_GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/fixture_scene.golden.json");

// ---------------------------------------------------------------- geometry

pub fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r] += m[r][c] * v[c];
        }
    }
    out
}

pub fn mat_t_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[c] += m[r][c] * v[r];
        }
    }
    out
}

/// Rotation from Z-Y-X Euler angles, built from elementary rotations.
pub fn euler(yaw: f64, pitch: f64, roll: f64) -> [[f64; 3]; 3] {
    let (cy, sy) = (yaw.cos(), yaw.sin());
    let (cp, sp) = (pitch.cos(), pitch.sin());
    let (cr, sr) = (roll.cos(), roll.sin());
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

/// World point to camera coordinates via the vehicle frame.
pub fn oracle_world_to_camera(p: [f64; 3], ego: &EgoPose, cam: &CameraRig) -> [f64; 3] {
    let t = ego.translation.0;
    let v = mat_t_vec(&ego.rotation.0, [p[0] - t[0], p[1] - t[1], p[2] - t[2]]);
    let c = mat_vec(&cam.rotation.0, v);
    let tc = cam.translation.0;
    [c[0] + tc[0], c[1] + tc[1], c[2] + tc[2]]
}

/// The eight world-frame corners of a yawed box, in any order.
pub fn oracle_corners(inst: &Instance) -> Vec<[f64; 3]> {
    let [l, w, h] = inst.size.0;
    let (c, s) = (inst.yaw.cos(), inst.yaw.sin());
    let mut out = Vec::new();
    for sx in [-0.5, 0.5] {
        for sy in [-0.5, 0.5] {
            for sz in [-0.5, 0.5] {
                let (x, y) = (sx * l, sy * w);
                out.push([
                    inst.center.0[0] + c * x - s * y,
                    inst.center.0[1] + s * x + c * y,
                    inst.center.0[2] + sz * h,
                ]);
            }
        }
    }
    out
}

// ---------------------------------------------------------------- occlusion

fn orient(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

fn in_triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2], p: [f64; 2]) -> bool {
    let area = orient(a, b, c);
    if area == 0.0 {
        return false;
    }
    let s = area.signum();
    s * orient(a, b, p) >= 0.0 && s * orient(b, c, p) >= 0.0 && s * orient(c, a, p) >= 0.0
}

/// Projected pixels of the corners at or beyond the near plane.
pub fn oracle_pixels(inst: &Instance, ego: &EgoPose, cam: &CameraRig, z_near: f64) -> Vec<[f64; 2]> {
    let k = &cam.intrinsics.0;
    oracle_corners(inst)
        .into_iter()
        .map(|p| oracle_world_to_camera(p, ego, cam))
        .filter(|c| c[2] >= z_near)
        .map(|c| [k[0][0] * c[0] / c[2] + k[0][2], k[1][1] * c[1] / c[2] + k[1][2]])
        .collect()
}

/// Whether the pixel center lies in the convex hull of `pts`, tested as
/// membership in any non-degenerate triangle of three of them.
pub fn covered(pts: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if in_triangle(pts[i], pts[j], pts[k], p) {
                    return true;
                }
            }
        }
    }
    false
}

/// Per pixel, the covering instance with the smallest center depth (lower
/// track id on ties), or `None`.
pub fn nearest_owner(frame: &Frame, cam: &CameraRig, z_near: f64) -> Vec<Option<usize>> {
    let shapes: Vec<(f64, u64, Vec<[f64; 2]>)> = frame
        .instances
        .iter()
        .map(|inst| {
            let depth = oracle_world_to_camera(inst.center.0, &frame.ego, cam)[2];
            (depth, inst.track_id, oracle_pixels(inst, &frame.ego, cam, z_near))
        })
        .collect();
    let mut owner = vec![None; (cam.width * cam.height) as usize];
    for y in 0..cam.height {
        for x in 0..cam.width {
            let p = [x as f64 + 0.5, y as f64 + 0.5];
            let mut best: Option<(f64, u64, usize)> = None;
            for (i, (depth, id, pts)) in shapes.iter().enumerate() {
                if !covered(pts, p) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bd, bid, _)) => *depth < bd || (*depth == bd && *id < bid),
                };
                if better {
                    best = Some((*depth, *id, i));
                }
            }
            owner[(y * cam.width + x) as usize] = best.map(|b| b.2);
        }
    }
    owner
}

/// Opaque box raster from the brute-force owner map.
pub fn oracle_box_raster(frame: &Frame, cam: &CameraRig, palette: &Palette, z_near: f64) -> RgbImage {
    let owner = nearest_owner(frame, cam, z_near);
    let mut img = RgbImage::new(cam.width, cam.height);
    for y in 0..cam.height {
        for x in 0..cam.width {
            if let Some(i) = owner[(y * cam.width + x) as usize] {
                img.put(x, y, palette.object_color(&frame.instances[i].class_label).unwrap());
            }
        }
    }
    img
}

// ---------------------------------------------------------------- scenes

pub fn camera(name: &str, width: u32, height: u32, yaw: f64, mount: [f64; 3]) -> CameraRig {
    let (s, c) = yaw.sin_cos();
    let r = [[s, -c, 0.0], [0.0, 0.0, -1.0], [c, s, 0.0]];
    let t = mat_vec(&r, mount).map(|v| -v);
    let f = 0.7 * width as f64;
    CameraRig {
        name: name.into(),
        intrinsics: Mat3::from_rows([[f, 0.0, width as f64 / 2.0], [0.0, f, height as f64 / 2.0], [0.0, 0.0, 1.0]]),
        rotation: Mat3::from_rows(r),
        translation: Vec3(t),
        width,
        height,
    }
}

/// One-frame scene with up to six random boxes in front of a small camera.
pub fn random_box_scene(rng: &mut SplitMix64) -> Scene {
    let width = 8 * rng.range_inclusive(2, 8) as u32;
    let height = 8 * rng.range_inclusive(2, 8) as u32;
    let cam = camera("CAM", width, height, rng.symmetric(0.3), [rng.uniform(0.0, 2.0), rng.symmetric(0.5), rng.uniform(1.0, 2.0)]);
    let ego = EgoPose::planar(Vec3::new(rng.symmetric(50.0), rng.symmetric(50.0), 0.0), rng.symmetric(3.1));
    let classes = ClassRegistry::default().objects;
    let n = rng.range_inclusive(0, 6) as usize;
    let instances = (0..n)
        .map(|i| {
            let local = [rng.uniform(2.0, 30.0), rng.symmetric(10.0), rng.uniform(0.0, 2.0)];
            let yaw_e = ego.rotation.0[1][0].atan2(ego.rotation.0[0][0]);
            let world = {
                let r = mat_vec(&ego.rotation.0, local);
                [r[0] + ego.translation.0[0], r[1] + ego.translation.0[1], r[2]]
            };
            Instance {
                track_id: 10 + (i as u64) * 7 % 13,
                class_label: classes[rng.range_inclusive(0, classes.len() as u64 - 1) as usize].clone(),
                center: Vec3(world),
                size: Vec3::new(rng.uniform(0.5, 8.0), rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.5)),
                yaw: yaw_e + rng.symmetric(3.1),
            }
        })
        .collect();
    Scene {
        scene_id: "random".into(),
        frame_rate: 10.0,
        cameras: vec![cam],
        map: vec![],
        frames: vec![Frame { index: 0, timestamp: 0.0, ego, instances }],
    }
}

// ---------------------------------------------------------------- attention

/// Textbook attention: explicit projections, exponentials without any
/// stabilizing shift, and straight double loops.
pub fn naive_attention(
    queries: &[Vec<f64>],
    kv: &[Vec<f64>],
    w_q: &[Vec<f64>],
    w_k: &[Vec<f64>],
    w_v: &[Vec<f64>],
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = w_q.len();
    let project = |w: &[Vec<f64>], x: &[f64]| -> Vec<f64> { (0..d).map(|r| (0..d).map(|c| w[r][c] * x[c]).sum()).collect() };
    let q: Vec<Vec<f64>> = queries.iter().map(|x| project(w_q, x)).collect();
    let k: Vec<Vec<f64>> = kv.iter().map(|x| project(w_k, x)).collect();
    let v: Vec<Vec<f64>> = kv.iter().map(|x| project(w_v, x)).collect();
    let scale = 1.0 / (d as f64).sqrt();
    let mut weights = Vec::new();
    let mut out = Vec::new();
    for qi in &q {
        let e: Vec<f64> = k.iter().map(|kj| (qi.iter().zip(kj).map(|(a, b)| a * b).sum::<f64>() * scale).exp()).collect();
        let z: f64 = e.iter().sum();
        let w: Vec<f64> = e.iter().map(|x| x / z).collect();
        let mut o = vec![0.0; d];
        for (j, wj) in w.iter().enumerate() {
            for c in 0..d {
                o[c] += wj * v[j][c];
            }
        }
        weights.push(w);
        out.push(o);
    }
    (weights, out)
}

pub fn random_rows(rows: usize, cols: usize, rng: &mut SplitMix64, scale: f64) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.symmetric(scale)).collect()).collect()
}

// ---------------------------------------------------------------- misc

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Decoded PNG from a compiled bundle.
pub fn read_png(path: &std::path::Path) -> RgbImage {
    physica_core::png_io::read_png(path).unwrap().0
}

// ---------------------------------------------------------------- fuzzing

/// Awkward but finite floats: signed zeros, subnormals, huge and tiny values.
pub fn nasty_f64(rng: &mut SplitMix64) -> f64 {
    match rng.range_inclusive(0, 7) {
        0 => -0.0,
        1 => 5e-324 * rng.range_inclusive(1, 1000) as f64,
        2 => rng.symmetric(1.0) * 1e300,
        3 => rng.symmetric(1.0) * 1e-300,
        4 => (rng.next_u64() % 100_000) as f64 / 8.0 - 5000.0,
        5 => 0.1 * rng.range_inclusive(0, 30) as f64,
        _ => rng.symmetric(1000.0),
    }
}

/// A random scene satisfying every invariant, with awkward float values
/// wherever the invariants allow them.
pub fn random_valid_scene(rng: &mut SplitMix64) -> Scene {
    let classes = ClassRegistry::default();
    let views = rng.range_inclusive(1, 3) as usize;
    let cameras = (0..views)
        .map(|v| {
            let r = euler(rng.symmetric(3.1), rng.symmetric(1.5), rng.symmetric(3.1));
            let fx = rng.uniform(1.0, 2000.0);
            CameraRig {
                name: format!("CAM_{v}"),
                intrinsics: Mat3::from_rows([[fx, 0.0, nasty_f64(rng)], [0.0, rng.uniform(1.0, 2000.0), nasty_f64(rng)], [0.0, 0.0, 1.0]]),
                rotation: Mat3::from_rows(r),
                translation: Vec3::new(nasty_f64(rng), nasty_f64(rng), nasty_f64(rng)),
                width: 8 * rng.range_inclusive(1, 200) as u32,
                height: 8 * rng.range_inclusive(1, 200) as u32,
            }
        })
        .collect();
    let frames_n = rng.range_inclusive(1, 4) as usize;
    let mut t = nasty_f64(rng).clamp(-1e6, 1e6);
    let frames = (0..frames_n)
        .map(|i| {
            t += rng.uniform(0.01, 1.0);
            let n = rng.range_inclusive(0, 3);
            Frame {
                index: i as u32,
                timestamp: t,
                ego: EgoPose {
                    rotation: Mat3::from_rows(euler(rng.symmetric(3.1), rng.symmetric(0.5), rng.symmetric(0.5))),
                    translation: Vec3::new(nasty_f64(rng), nasty_f64(rng), nasty_f64(rng)),
                },
                instances: (0..n)
                    .map(|id| Instance {
                        track_id: id,
                        class_label: classes.objects[rng.range_inclusive(0, 9) as usize].clone(),
                        center: Vec3::new(nasty_f64(rng), nasty_f64(rng), nasty_f64(rng)),
                        size: Vec3::new(rng.uniform(0.1, 20.0), rng.uniform(0.1, 5.0), 1e-3 + nasty_f64(rng).abs().min(1e300)),
                        yaw: nasty_f64(rng),
                    })
                    .collect(),
            }
        })
        .collect();
    let map = (0..rng.range_inclusive(0, 3))
        .map(|_| {
            let len = rng.range_inclusive(2, 5);
            physica_core::scene::MapElement {
                kind: classes.roads[rng.range_inclusive(0, 9) as usize].name.clone(),
                polyline: (0..len).map(|k| Vec3::new(k as f64 + rng.uniform(0.0, 0.5), nasty_f64(rng), nasty_f64(rng))).collect(),
            }
        })
        .collect();
    Scene {
        scene_id: format!("fuzz-{:x}", rng.next_u64()),
        frame_rate: rng.uniform(0.5, 60.0),
        cameras,
        map,
        frames,
    }
}

pub fn random_tensor_file(rng: &mut SplitMix64) -> physica_core::tensor_file::TensorFile {
    use physica_core::tensor_file::{TensorData, TensorEntry, TensorFile};
    let mut file = TensorFile::new();
    for e in 0..rng.range_inclusive(0, 6) {
        let rank = rng.range_inclusive(0, 3) as usize;
        let dims: Vec<u32> = (0..rank).map(|_| rng.range_inclusive(0, 5) as u32).collect();
        let n: usize = dims.iter().map(|&d| d as usize).product();
        let data = match rng.range_inclusive(0, 2) {
            0 => TensorData::F32((0..n).map(|_| f32::from_bits(rng.next_u64() as u32)).collect()),
            1 => TensorData::F64((0..n).map(|_| f64::from_bits(rng.next_u64())).collect()),
            _ => TensorData::U8((0..n).map(|_| rng.next_u64() as u8).collect()),
        };
        let name: String = format!("t{e}.") + &"αβx_".chars().cycle().skip(rng.range_inclusive(0, 3) as usize).take(rng.range_inclusive(0, 6) as usize).collect::<String>();
        file.push(TensorEntry::new(name, dims, data));
    }
    file
}

/// SHA-256 of every file in a directory, sorted by name.
pub fn directory_digest(dir: &std::path::Path) -> Vec<(String, String)> {
    use sha2::{Digest, Sha256};
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let bytes = std::fs::read(e.path()).unwrap();
            (e.file_name().to_string_lossy().into_owned(), hex::encode(Sha256::digest(&bytes)))
        })
        .collect();
    out.sort();
    out
}
