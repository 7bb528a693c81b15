use serde::{Deserialize, Serialize};

use super::lanes::LaneLayout;
use super::ScriptError;
use crate::geometry::Vec3;
use crate::scene::{validate_scene_with, CameraRig, ClassRegistry, EgoPose, Frame, Instance, Scene};

/// Speed `speed` (m/s) holds from time `from` (s) until the next segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedSegment {
    pub from: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoScript {
    pub lane: usize,
    pub s0: f64,
    /// Piecewise-constant speed profile; the first segment starts at t = 0.
    pub speeds: Vec<SpeedSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Behavior {
    ConstantSpeed { lane: usize, speed: f64 },
    /// Smoothstep lane change from `source_lane` to `target_lane` over
    /// `[t_start, t_start + duration]` at constant speed.
    CutIn { source_lane: usize, target_lane: usize, t_start: f64, duration: f64, speed: f64 },
    /// Cruise at `v0`, then decelerate at `decel` from `t_start` until stopped.
    Brake { lane: usize, t_start: f64, decel: f64, v0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActorScript {
    pub id: u64,
    pub class_label: String,
    /// (length, width, height).
    pub size: [f64; 3],
    pub s0: f64,
    pub behavior: Behavior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene_id: Option<String>,
    pub frames: usize,
    pub frame_rate: f64,
    pub layout: LaneLayout,
    pub ego: EgoScript,
    #[serde(default)]
    pub actors: Vec<ActorScript>,
}

/// Road-coordinate kinematics of a scripted agent at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadState {
    pub s: f64,
    pub d: f64,
    /// ds/dt along the reference line.
    pub s_rate: f64,
    /// dd/dt.
    pub d_rate: f64,
}

fn finite(v: f64, what: &str) -> Result<(), ScriptError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ScriptError::InvalidScript(format!("{what} is not finite")))
    }
}

fn nonneg(v: f64, what: &str) -> Result<(), ScriptError> {
    finite(v, what)?;
    if v < 0.0 {
        return Err(ScriptError::InvalidScript(format!("{what} {v} is negative")));
    }
    Ok(())
}

impl EgoScript {
    pub fn validate(&self, layout: &LaneLayout) -> Result<(), ScriptError> {
        layout.lane_offset(self.lane)?;
        finite(self.s0, "ego s0")?;
        let first = self.speeds.first().ok_or_else(|| ScriptError::InvalidScript("ego speed profile is empty".into()))?;
        if first.from != 0.0 {
            return Err(ScriptError::InvalidScript("ego speed profile must start at t = 0".into()));
        }
        for (i, seg) in self.speeds.iter().enumerate() {
            nonneg(seg.speed, "ego speed")?;
            finite(seg.from, "ego segment start")?;
            if i > 0 && seg.from <= self.speeds[i - 1].from {
                return Err(ScriptError::InvalidScript("ego segment starts must increase".into()));
            }
        }
        Ok(())
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        self.speeds.iter().rev().find(|seg| seg.from <= t).map_or(self.speeds[0].speed, |seg| seg.speed)
    }

    /// Arc length travelled since t = 0.
    pub fn distance_at(&self, t: f64) -> f64 {
        let mut dist = 0.0;
        for (i, seg) in self.speeds.iter().enumerate() {
            if seg.from >= t {
                break;
            }
            let end = self.speeds.get(i + 1).map_or(t, |next| next.from.min(t));
            dist += seg.speed * (end - seg.from);
        }
        dist
    }

    pub fn state_at(&self, layout: &LaneLayout, t: f64) -> RoadState {
        RoadState {
            s: self.s0 + self.distance_at(t),
            d: self.lane as f64 * layout.lane_width,
            s_rate: self.speed_at(t),
            d_rate: 0.0,
        }
    }
}

fn smoothstep(x: f64) -> (f64, f64) {
    let x = x.clamp(0.0, 1.0);
    (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x))
}

impl Behavior {
    pub fn validate(&self, layout: &LaneLayout) -> Result<(), ScriptError> {
        match *self {
            Behavior::ConstantSpeed { lane, speed } => {
                layout.lane_offset(lane)?;
                nonneg(speed, "speed")
            }
            Behavior::CutIn { source_lane, target_lane, t_start, duration, speed } => {
                layout.lane_offset(source_lane)?;
                layout.lane_offset(target_lane)?;
                if source_lane == target_lane {
                    return Err(ScriptError::InvalidScript("cut-in source and target lanes coincide".into()));
                }
                nonneg(t_start, "cut-in start")?;
                nonneg(speed, "speed")?;
                if !(duration > 0.0 && duration.is_finite()) {
                    return Err(ScriptError::InvalidScript(format!("cut-in duration {duration} must be positive")));
                }
                Ok(())
            }
            Behavior::Brake { lane, t_start, decel, v0 } => {
                layout.lane_offset(lane)?;
                nonneg(t_start, "brake start")?;
                nonneg(v0, "v0")?;
                if !(decel > 0.0 && decel.is_finite()) {
                    return Err(ScriptError::InvalidScript(format!("deceleration {decel} must be positive")));
                }
                Ok(())
            }
        }
    }

    /// Lane the behavior ends in.
    pub fn final_lane(&self) -> usize {
        match *self {
            Behavior::ConstantSpeed { lane, .. } | Behavior::Brake { lane, .. } => lane,
            Behavior::CutIn { target_lane, .. } => target_lane,
        }
    }
}

impl ActorScript {
    pub fn validate(&self, layout: &LaneLayout) -> Result<(), ScriptError> {
        finite(self.s0, "actor s0")?;
        if !self.size.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(ScriptError::InvalidScript(format!("actor {} size must be positive", self.id)));
        }
        self.behavior.validate(layout)
    }

    pub fn state_at(&self, layout: &LaneLayout, t: f64) -> RoadState {
        let w = layout.lane_width;
        match self.behavior {
            Behavior::ConstantSpeed { lane, speed } => {
                RoadState { s: self.s0 + speed * t, d: lane as f64 * w, s_rate: speed, d_rate: 0.0 }
            }
            Behavior::CutIn { source_lane, target_lane, t_start, duration, speed } => {
                let (d_src, d_tgt) = (source_lane as f64 * w, target_lane as f64 * w);
                let (blend, slope) = smoothstep((t - t_start) / duration);
                let inside = t > t_start && t < t_start + duration;
                RoadState {
                    s: self.s0 + speed * t,
                    d: d_src * (1.0 - blend) + d_tgt * blend,
                    s_rate: speed,
                    d_rate: if inside { (d_tgt - d_src) * slope / duration } else { 0.0 },
                }
            }
            Behavior::Brake { lane, t_start, decel, v0 } => {
                let t_stop = t_start + v0 / decel;
                let (s, v) = if t <= t_start {
                    (v0 * t, v0)
                } else {
                    let tau = t.min(t_stop) - t_start;
                    (v0 * t_start + v0 * tau - 0.5 * decel * tau * tau, (v0 - decel * (t - t_start)).max(0.0))
                };
                RoadState { s: self.s0 + s, d: lane as f64 * w, s_rate: v, d_rate: 0.0 }
            }
        }
    }
}

impl RoadState {
    /// World-frame heading of the motion, falling back to the lane tangent at rest.
    pub fn yaw(&self, layout: &LaneLayout) -> f64 {
        let along = self.s_rate * (1.0 - layout.curvature * self.d);
        let drift = if along == 0.0 && self.d_rate == 0.0 { 0.0 } else { self.d_rate.atan2(along) };
        layout.heading_at(self.s) + drift
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScriptError> {
        self.layout.validate()?;
        if self.frames < 2 {
            return Err(ScriptError::InvalidScript("at least two frames are required".into()));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(ScriptError::InvalidScript(format!("frame rate {} must be positive", self.frame_rate)));
        }
        self.ego.validate(&self.layout)?;
        let mut ids: Vec<u64> = self.actors.iter().map(|a| a.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(ScriptError::InvalidScript("actor ids must be unique".into()));
        }
        self.actors.iter().try_for_each(|a| a.validate(&self.layout))
    }

    pub fn timestamp(&self, frame: usize) -> f64 {
        frame as f64 / self.frame_rate
    }

    /// Last sampled timestamp.
    pub fn horizon(&self) -> f64 {
        self.timestamp(self.frames.saturating_sub(1))
    }
}

/// Rolls the scripted agents forward and samples one frame per `1/frame_rate`.
///
/// `seed` names the scene (`sim-<hex>`) when the script carries no id; the
/// kinematics themselves are deterministic.
pub fn simulate(scenario: &Scenario, cameras: &[CameraRig], seed: u64) -> Result<Scene, ScriptError> {
    simulate_with(scenario, cameras, seed, &ClassRegistry::default())
}

pub fn simulate_with(
    scenario: &Scenario,
    cameras: &[CameraRig],
    seed: u64,
    registry: &ClassRegistry,
) -> Result<Scene, ScriptError> {
    scenario.validate()?;
    let layout = &scenario.layout;
    let mut actors: Vec<&ActorScript> = scenario.actors.iter().collect();
    actors.sort_by_key(|a| a.id);

    let frames = (0..scenario.frames)
        .map(|i| {
            let t = scenario.timestamp(i);
            let ego = scenario.ego.state_at(layout, t);
            let [ex, ey] = layout.to_world(ego.s, ego.d);
            let instances = actors
                .iter()
                .map(|a| {
                    let st = a.state_at(layout, t);
                    let [x, y] = layout.to_world(st.s, st.d);
                    Instance {
                        track_id: a.id,
                        class_label: a.class_label.clone(),
                        center: Vec3::new(x, y, 0.5 * a.size[2]),
                        size: Vec3(a.size),
                        yaw: st.yaw(layout),
                    }
                })
                .collect();
            Frame {
                index: i as u32,
                timestamp: t,
                ego: EgoPose::planar(Vec3::new(ex, ey, 0.0), ego.yaw(layout)),
                instances,
            }
        })
        .collect();

    let scene = Scene {
        scene_id: scenario.scene_id.clone().unwrap_or_else(|| format!("sim-{seed:016x}")),
        frame_rate: scenario.frame_rate,
        cameras: cameras.to_vec(),
        map: layout.map_elements(),
        frames,
    };
    let errors: Vec<_> = validate_scene_with(&scene, registry).into_iter().filter(|v| v.is_error()).collect();
    if !errors.is_empty() {
        return Err(ScriptError::Invariant(errors));
    }
    Ok(scene)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlapWarning {
    pub frame: usize,
    pub first: u64,
    pub second: u64,
}

fn footprint(inst: &Instance) -> [[f64; 2]; 4] {
    let (c, s) = (inst.yaw.cos(), inst.yaw.sin());
    let (hl, hw) = (0.5 * inst.size.0[0], 0.5 * inst.size.0[1]);
    [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
        .map(|(a, b)| [inst.center.0[0] + a * c - b * s, inst.center.0[1] + a * s + b * c])
}

fn footprints_overlap(a: &[[f64; 2]; 4], b: &[[f64; 2]; 4]) -> bool {
    for poly in [a, b] {
        for i in 0..2 {
            let e = [poly[i + 1][0] - poly[i][0], poly[i + 1][1] - poly[i][1]];
            let axis = [-e[1], e[0]];
            let proj = |p: &[[f64; 2]; 4]| {
                p.iter().map(|q| q[0] * axis[0] + q[1] * axis[1]).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
            };
            let (alo, ahi) = proj(a);
            let (blo, bhi) = proj(b);
            if ahi <= blo || bhi <= alo {
                return false;
            }
        }
    }
    true
}

/// Pairs of instances whose ground footprints intersect in some frame.
/// Scripts are not rejected for this; callers decide how loud to be.
pub fn overlap_warnings(scene: &Scene) -> Vec<OverlapWarning> {
    let mut out = Vec::new();
    for (fi, frame) in scene.frames.iter().enumerate() {
        let prints: Vec<_> = frame.instances.iter().map(footprint).collect();
        for i in 0..prints.len() {
            for j in i + 1..prints.len() {
                if footprints_overlap(&prints[i], &prints[j]) {
                    let (a, b) = (frame.instances[i].track_id, frame.instances[j].track_id);
                    out.push(OverlapWarning { frame: fi, first: a.min(b), second: a.max(b) });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::test_support::test_camera;

    fn base() -> Scenario {
        Scenario {
            scene_id: None,
            frames: 13,
            frame_rate: 12.0,
            layout: LaneLayout::straight(3, 3.5, 200.0),
            ego: EgoScript { lane: 0, s0: 20.0, speeds: vec![SpeedSegment { from: 0.0, speed: 10.0 }] },
            actors: vec![],
        }
    }

    fn actor(id: u64, behavior: Behavior) -> ActorScript {
        ActorScript { id, class_label: "car".into(), size: [4.5, 1.9, 1.6], s0: 40.0, behavior }
    }

    #[test]
    fn ego_profile_integrates_piecewise() {
        let ego = EgoScript {
            lane: 0,
            s0: 0.0,
            speeds: vec![SpeedSegment { from: 0.0, speed: 10.0 }, SpeedSegment { from: 1.0, speed: 4.0 }],
        };
        assert_eq!(ego.distance_at(0.5), 5.0);
        assert_eq!(ego.distance_at(2.0), 14.0);
        assert_eq!(ego.speed_at(1.5), 4.0);
    }

    #[test]
    fn constant_speed_actor_steps_exactly() {
        let mut sc = base();
        sc.actors.push(actor(7, Behavior::ConstantSpeed { lane: 1, speed: 12.0 }));
        let scene = simulate(&sc, &[test_camera(64, 48)], 3).unwrap();
        assert_eq!(scene.scene_id, "sim-0000000000000003");
        let c0 = scene.frames[0].instances[0].center;
        let c1 = scene.frames[1].instances[0].center;
        assert!((c1.0[0] - c0.0[0] - 1.0).abs() < 1e-12);
        assert_eq!(c0.0[1], 3.5);
        assert_eq!(c0.0[2], 0.8);
        assert_eq!(scene.frames[12].timestamp, 1.0);
    }

    #[test]
    fn cut_in_lands_on_target() {
        let b = Behavior::CutIn { source_lane: 1, target_lane: 0, t_start: 0.25, duration: 0.5, speed: 8.0 };
        let a = actor(1, b);
        let layout = LaneLayout::straight(3, 3.5, 200.0);
        assert_eq!(a.state_at(&layout, 0.0).d, 3.5);
        assert_eq!(a.state_at(&layout, 0.75).d, 0.0);
        let mid = a.state_at(&layout, 0.5);
        assert!((mid.d - 1.75).abs() < 1e-12);
        assert!(mid.yaw(&layout) < 0.0, "heading turns right toward lane 0");
    }

    #[test]
    fn brake_stops_and_stays() {
        let a = actor(1, Behavior::Brake { lane: 0, t_start: 1.0, decel: 5.0, v0: 10.0 });
        let layout = LaneLayout::straight(1, 3.5, 200.0);
        let stop = a.state_at(&layout, 3.0);
        assert_eq!(stop.s, 40.0 + 10.0 + 10.0);
        assert_eq!(a.state_at(&layout, 9.0).s, stop.s);
        assert_eq!(a.state_at(&layout, 9.0).s_rate, 0.0);
    }

    #[test]
    fn script_errors() {
        let mut sc = base();
        sc.actors.push(actor(1, Behavior::ConstantSpeed { lane: 5, speed: 1.0 }));
        assert!(matches!(simulate(&sc, &[test_camera(64, 48)], 0), Err(ScriptError::UnknownLane(5))));
        let mut sc = base();
        sc.actors.push(actor(1, Behavior::ConstantSpeed { lane: 0, speed: 1.0 }));
        sc.actors[0].class_label = "spaceship".into();
        assert!(matches!(simulate(&sc, &[test_camera(64, 48)], 0), Err(ScriptError::Invariant(_))));
        let mut sc = base();
        sc.ego.speeds[0].from = 0.5;
        assert!(matches!(simulate(&sc, &[test_camera(64, 48)], 0), Err(ScriptError::InvalidScript(_))));
    }

    #[test]
    fn overlapping_actors_are_reported() {
        let mut sc = base();
        sc.actors.push(actor(2, Behavior::ConstantSpeed { lane: 0, speed: 5.0 }));
        sc.actors.push(ActorScript { s0: 42.0, ..actor(1, Behavior::ConstantSpeed { lane: 0, speed: 5.0 }) });
        sc.actors.push(actor(3, Behavior::ConstantSpeed { lane: 2, speed: 5.0 }));
        let scene = simulate(&sc, &[test_camera(64, 48)], 0).unwrap();
        let w = overlap_warnings(&scene);
        assert_eq!(w.len(), 13);
        assert!(w.iter().all(|o| (o.first, o.second) == (1, 2)));
    }
}
