//! Convex fills and thick segments over pixel centers.
//!
//! A pixel `(x, y)` is sampled at its center `(x + 0.5, y + 0.5)`. All
//! routines visit only pixels inside the image.

pub type Point2 = [f64; 2];

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (in y-up orientation) by monotone chain.
/// Collinear and duplicate points are dropped.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Clamped inclusive pixel range whose centers may fall in `[lo, hi]`.
fn pixel_span(lo: f64, hi: f64, limit: u32) -> Option<(u32, u32)> {
    if !(lo <= hi) || limit == 0 {
        return None;
    }
    let first = (lo - 0.5).ceil().max(0.0);
    let last = (hi - 0.5).floor().min(limit as f64 - 1.0);
    (first <= last).then(|| (first as u32, last as u32))
}

/// Inclusive point-in-convex-polygon test for a hull from [`convex_hull`].
pub fn hull_contains(hull: &[Point2], p: Point2) -> bool {
    if hull.len() < 3 {
        return false;
    }
    (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], p) >= 0.0)
}

/// Visits every pixel whose center lies inside or on the hull. Hulls with
/// fewer than three vertices have no area and cover nothing.
pub fn fill_hull(hull: &[Point2], width: u32, height: u32, mut visit: impl FnMut(u32, u32)) {
    if hull.len() < 3 {
        return;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in hull {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let (Some((px0, px1)), Some((py0, py1))) = (pixel_span(x0, x1, width), pixel_span(y0, y1, height)) else {
        return;
    };
    for y in py0..=py1 {
        let cy = y as f64 + 0.5;
        for x in px0..=px1 {
            if hull_contains(hull, [x as f64 + 0.5, cy]) {
                visit(x, y);
            }
        }
    }
}

/// Squared distance from `p` to segment `a`–`b`.
pub fn segment_distance_sq(a: Point2, b: Point2, p: Point2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * d[0] - p[0], a[1] + t * d[1] - p[1]];
    q[0] * q[0] + q[1] * q[1]
}

/// Visits every pixel whose center lies within `line_width / 2` of the
/// segment (a capsule).
pub fn stroke_segment(a: Point2, b: Point2, line_width: f64, width: u32, height: u32, mut visit: impl FnMut(u32, u32)) {
    let r = line_width * 0.5;
    let r2 = r * r;
    let Some((py0, py1)) = pixel_span(a[1].min(b[1]) - r, a[1].max(b[1]) + r, height) else {
        return;
    };
    let dy = b[1] - a[1];
    let dx = b[0] - a[0];
    for y in py0..=py1 {
        let cy = y as f64 + 0.5;
        // Superset of the capsule's extent on this row; the exact distance
        // test below decides membership.
        let (t0, t1) = if dy.abs() > 1e-12 {
            let ta = (cy - r - a[1]) / dy;
            let tb = (cy + r - a[1]) / dy;
            (ta.min(tb).max(0.0), ta.max(tb).min(1.0))
        } else {
            (0.0, 1.0)
        };
        if t0 > t1 {
            continue;
        }
        let xa = a[0] + t0 * dx;
        let xb = a[0] + t1 * dx;
        let Some((px0, px1)) = pixel_span(xa.min(xb) - r - 1.0, xa.max(xb) + r + 1.0, width) else {
            continue;
        };
        for x in px0..=px1 {
            if segment_distance_sq(a, b, [x as f64 + 0.5, cy]) <= r2 {
                visit(x, y);
            }
        }
    }
}
