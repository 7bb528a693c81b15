use serde::{Deserialize, Serialize};

use super::lanes::LaneLayout;
use super::script::{ActorScript, Behavior, EgoScript, Scenario, SpeedSegment};
use super::ScriptError;
use crate::rng::SplitMix64;

/// (label, size, relative weight) of the classes the sampler spawns.
const ACTOR_CLASSES: [(&str, [f64; 3], f64); 4] = [
    ("car", [4.6, 1.9, 1.7], 5.0),
    ("truck", [7.5, 2.5, 3.0], 2.0),
    ("bus", [11.0, 2.9, 3.3], 1.0),
    ("motorcycle", [2.2, 0.8, 1.5], 1.0),
];

/// Sampling ranges for [`random_scenario`]. Pairs are inclusive `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomRanges {
    pub frames: usize,
    pub frame_rate: f64,
    pub lane_count: [usize; 2],
    pub lane_width: [f64; 2],
    pub curvature: [f64; 2],
    /// Chance of a straight road regardless of `curvature`.
    pub straight_probability: f64,
    pub road_length: f64,
    pub actor_count: [usize; 2],
    pub ego_speed: [f64; 2],
    pub actor_speed: [f64; 2],
    /// Actor start positions relative to the ego, meters along the road.
    pub longitudinal_gap: [f64; 2],
    pub parked_probability: f64,
    /// Relative weights of constant-speed, cut-in and brake behaviors.
    pub behavior_weights: [f64; 3],
    pub cut_in_duration: [f64; 2],
    pub decel: [f64; 2],
}

impl Default for RandomRanges {
    fn default() -> Self {
        Self {
            frames: 16,
            frame_rate: 12.0,
            lane_count: [2, 4],
            lane_width: [3.0, 3.8],
            curvature: [-0.01, 0.01],
            straight_probability: 0.5,
            road_length: 300.0,
            actor_count: [2, 6],
            ego_speed: [0.0, 15.0],
            actor_speed: [0.0, 20.0],
            longitudinal_gap: [-30.0, 60.0],
            parked_probability: 0.15,
            behavior_weights: [1.0, 1.0, 1.0],
            cut_in_duration: [0.4, 1.0],
            decel: [2.0, 8.0],
        }
    }
}

fn check_pair(name: &str, [lo, hi]: [f64; 2], min: f64) -> Result<(), ScriptError> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo >= min) {
        return Err(ScriptError::InvalidRanges(format!("{name} [{lo}, {hi}] must be finite, ordered and >= {min}")));
    }
    Ok(())
}

fn check_prob(name: &str, p: f64) -> Result<(), ScriptError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ScriptError::InvalidRanges(format!("{name} {p} is not a probability")));
    }
    Ok(())
}

impl RandomRanges {
    pub fn validate(&self) -> Result<(), ScriptError> {
        if self.frames < 2 {
            return Err(ScriptError::InvalidRanges("at least two frames are required".into()));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return Err(ScriptError::InvalidRanges("frame rate must be positive".into()));
        }
        let [lanes_lo, lanes_hi] = self.lane_count;
        if lanes_lo == 0 || lanes_lo > lanes_hi {
            return Err(ScriptError::InvalidRanges("lane count range must be ordered and start at 1 or more".into()));
        }
        if self.actor_count[0] > self.actor_count[1] {
            return Err(ScriptError::InvalidRanges("actor count range must be ordered".into()));
        }
        check_pair("lane_width", self.lane_width, f64::MIN_POSITIVE)?;
        if self.lane_width[0] <= 2.0 {
            return Err(ScriptError::InvalidRanges("lane width must exceed 2 m".into()));
        }
        check_pair("curvature", self.curvature, f64::NEG_INFINITY)?;
        let worst = self.curvature[0].abs().max(self.curvature[1].abs()) * self.lane_width[1] * (lanes_hi as f64 - 0.5);
        if worst >= 1.0 {
            return Err(ScriptError::InvalidRanges("curvature too tight for the widest road".into()));
        }
        check_pair("ego_speed", self.ego_speed, 0.0)?;
        check_pair("actor_speed", self.actor_speed, 0.0)?;
        check_pair("longitudinal_gap", self.longitudinal_gap, f64::NEG_INFINITY)?;
        check_pair("cut_in_duration", self.cut_in_duration, f64::MIN_POSITIVE)?;
        check_pair("decel", self.decel, f64::MIN_POSITIVE)?;
        check_prob("straight_probability", self.straight_probability)?;
        check_prob("parked_probability", self.parked_probability)?;
        if !(self.road_length > 0.0 && self.road_length.is_finite()) {
            return Err(ScriptError::InvalidRanges("road length must be positive".into()));
        }
        let w = self.behavior_weights;
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
            return Err(ScriptError::InvalidRanges("behavior weights must be non-negative with a positive sum".into()));
        }
        Ok(())
    }
}

fn pick_weighted(rng: &mut SplitMix64, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.next_f64() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn pick(rng: &mut SplitMix64, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.uniform(lo, hi)
    }
}

fn pick_index(rng: &mut SplitMix64, [lo, hi]: [usize; 2]) -> usize {
    rng.range_inclusive(lo as u64, hi as u64) as usize
}

/// Draws a scripted scenario from `ranges`, deterministically for each seed.
///
/// Cut-ins are only drawn on multi-lane roads, move to an adjacent lane and
/// always complete by the last frame.
pub fn random_scenario(ranges: &RandomRanges, seed: u64) -> Result<Scenario, ScriptError> {
    ranges.validate()?;
    let mut rng = SplitMix64::keyed(seed, "scenario");
    let lane_count = pick_index(&mut rng, ranges.lane_count);
    let curved = !rng.bernoulli(ranges.straight_probability);
    let layout = LaneLayout {
        origin: [0.0, 0.0],
        heading: rng.symmetric(std::f64::consts::PI),
        curvature: if curved { pick(&mut rng, ranges.curvature) } else { 0.0 },
        lane_count,
        lane_width: pick(&mut rng, ranges.lane_width),
        length: ranges.road_length,
    };
    let horizon = (ranges.frames - 1) as f64 / ranges.frame_rate;
    let lane = |rng: &mut SplitMix64| rng.range_inclusive(0, lane_count as u64 - 1) as usize;

    let ego_s0 = rng.uniform(0.1, 0.2) * ranges.road_length;
    let ego = EgoScript { lane: lane(&mut rng), s0: ego_s0, speeds: vec![SpeedSegment { from: 0.0, speed: pick(&mut rng, ranges.ego_speed) }] };

    let mut weights = ranges.behavior_weights;
    if lane_count < 2 {
        weights[1] = 0.0;
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        weights = [1.0, 0.0, 0.0];
    }
    let class_weights: Vec<f64> = ACTOR_CLASSES.iter().map(|c| c.2).collect();

    let count = pick_index(&mut rng, ranges.actor_count);
    let actors = (1..=count as u64)
        .map(|id| {
            let (label, size, _) = ACTOR_CLASSES[pick_weighted(&mut rng, &class_weights)];
            let s0 = ego_s0 + pick(&mut rng, ranges.longitudinal_gap);
            let behavior = if rng.bernoulli(ranges.parked_probability) {
                Behavior::ConstantSpeed { lane: lane(&mut rng), speed: 0.0 }
            } else {
                let speed = pick(&mut rng, ranges.actor_speed);
                match pick_weighted(&mut rng, &weights) {
                    0 => Behavior::ConstantSpeed { lane: lane(&mut rng), speed },
                    1 => {
                        let source_lane = lane(&mut rng);
                        let target_lane = if source_lane == 0 {
                            1
                        } else if source_lane + 1 == lane_count || rng.bernoulli(0.5) {
                            source_lane - 1
                        } else {
                            source_lane + 1
                        };
                        let duration = pick(&mut rng, ranges.cut_in_duration).min(horizon);
                        let t_start = rng.uniform(0.0, 1.0) * (horizon - duration);
                        Behavior::CutIn { source_lane, target_lane, t_start, duration, speed }
                    }
                    _ => Behavior::Brake {
                        lane: lane(&mut rng),
                        t_start: rng.uniform(0.0, 1.0) * horizon,
                        decel: pick(&mut rng, ranges.decel),
                        v0: speed,
                    },
                }
            };
            ActorScript { id, class_label: label.into(), size, s0, behavior }
        })
        .collect();

    Ok(Scenario { scene_id: None, frames: ranges.frames, frame_rate: ranges.frame_rate, layout, ego, actors })
}
