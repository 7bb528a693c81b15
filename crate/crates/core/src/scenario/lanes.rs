use serde::{Deserialize, Serialize};

use super::ScriptError;
use crate::geometry::Vec3;
use crate::scene::MapElement;

const STRAIGHT_EPS: f64 = 1e-12;

/// Parallel lanes laid out along a straight or constant-curvature reference
/// line in the world z = 0 plane.
///
/// Positions are expressed in (s, d) road coordinates: `s` is arc length
/// along the reference line and `d` the signed offset to its left. Lane `k`
/// is centered at `d = k · lane_width`, so lane 0 runs on the reference line
/// and higher indices lie further left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneLayout {
    /// World (x, y) of the reference line at s = 0.
    pub origin: [f64; 2],
    /// Reference heading at s = 0, radians.
    pub heading: f64,
    /// 1/m, positive turns left; 0 for a straight road.
    #[serde(default)]
    pub curvature: f64,
    pub lane_count: usize,
    pub lane_width: f64,
    /// Extent of the exported lane lines, meters.
    pub length: f64,
}

impl LaneLayout {
    pub fn straight(lane_count: usize, lane_width: f64, length: f64) -> Self {
        Self { origin: [0.0, 0.0], heading: 0.0, curvature: 0.0, lane_count, lane_width, length }
    }

    pub fn validate(&self) -> Result<(), ScriptError> {
        let bad = |m: String| Err(ScriptError::InvalidLayout(m));
        if self.lane_count == 0 {
            return bad("at least one lane is required".into());
        }
        if !(self.lane_width > 2.0) || !self.lane_width.is_finite() {
            return bad(format!("lane width {} must exceed 2 m", self.lane_width));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad(format!("length {} must be positive", self.length));
        }
        if !self.curvature.is_finite() || !self.heading.is_finite() || !self.origin.iter().all(|v| v.is_finite()) {
            return bad("non-finite geometry".into());
        }
        let reach = self.lane_width * (self.lane_count as f64 - 0.5);
        let inner = if self.curvature > 0.0 { reach } else { 0.5 * self.lane_width };
        if self.curvature.abs() * inner >= 1.0 {
            return bad(format!("curvature {} too tight for {} lanes", self.curvature, self.lane_count));
        }
        Ok(())
    }

    pub fn is_straight(&self) -> bool {
        self.curvature.abs() < STRAIGHT_EPS
    }

    pub fn lane_offset(&self, lane: usize) -> Result<f64, ScriptError> {
        if lane >= self.lane_count {
            return Err(ScriptError::UnknownLane(lane));
        }
        Ok(lane as f64 * self.lane_width)
    }

    /// Reference heading at arc length `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        self.heading + self.curvature * s
    }

    /// World (x, y) of road coordinates (s, d).
    pub fn to_world(&self, s: f64, d: f64) -> [f64; 2] {
        let [x0, y0] = self.origin;
        let th = self.heading_at(s);
        let (base_x, base_y) = if self.is_straight() {
            (x0 + s * self.heading.cos(), y0 + s * self.heading.sin())
        } else {
            let k = self.curvature;
            (
                x0 + ((self.heading + k * s).sin() - self.heading.sin()) / k,
                y0 + (self.heading.cos() - (self.heading + k * s).cos()) / k,
            )
        };
        [base_x - d * th.sin(), base_y + d * th.cos()]
    }

    /// Inverse of [`to_world`] near the reference line.
    pub fn to_road(&self, p: [f64; 2]) -> (f64, f64) {
        let [x0, y0] = self.origin;
        let (t, n) = ((self.heading.cos(), self.heading.sin()), (-self.heading.sin(), self.heading.cos()));
        if self.is_straight() {
            let (dx, dy) = (p[0] - x0, p[1] - y0);
            return (dx * t.0 + dy * t.1, dx * n.0 + dy * n.1);
        }
        let r = 1.0 / self.curvature;
        let c = (x0 + r * n.0, y0 + r * n.1);
        let (rx, ry) = (p[0] - c.0, p[1] - c.1);
        let rho = rx.hypot(ry);
        let d = r - r.signum() * rho;
        // n(s) = −(p − c) / (R − d)
        let scale = -1.0 / (r - d);
        let (nx, ny) = (rx * scale, ry * scale);
        let th = (-nx).atan2(ny);
        let mut dth = th - self.heading;
        dth = (dth + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
        (dth / self.curvature, d)
    }

    /// Lane boundary lines sampled every 5 m: outer edges as `road_edge`,
    /// interior boundaries as `lane_divider`.
    pub fn map_elements(&self) -> Vec<MapElement> {
        let samples = ((self.length / 5.0).ceil() as usize).max(1);
        (0..=self.lane_count)
            .map(|b| {
                let d = (b as f64 - 0.5) * self.lane_width;
                let polyline = (0..=samples)
                    .map(|i| {
                        let s = self.length * i as f64 / samples as f64;
                        let [x, y] = self.to_world(s, d);
                        Vec3::new(x, y, 0.0)
                    })
                    .collect();
                let kind = if b == 0 || b == self.lane_count { "road_edge" } else { "lane_divider" };
                MapElement { kind: kind.into(), polyline }
            })
            .collect()
    }
}
