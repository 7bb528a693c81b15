//! Scripted long-tail traffic scenarios on parametric lane layouts.

mod config;
mod lanes;
mod random;
mod rig;
mod script;

use thiserror::Error;

use crate::scene::Violation;

pub use config::{parse_scenario_config, RigPreset, ScenarioConfig, SCENARIO_FORMAT};
pub use lanes::LaneLayout;
pub use random::{random_scenario, RandomRanges};
pub use rig::{horizontal_camera, surround_rig};
pub use script::{
    overlap_warnings, simulate, simulate_with, ActorScript, Behavior, EgoScript, OverlapWarning, RoadState, Scenario,
    SpeedSegment,
};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("invalid lane layout: {0}")]
    InvalidLayout(String),
    #[error("lane {0} does not exist")]
    UnknownLane(usize),
    #[error("invalid script: {0}")]
    InvalidScript(String),
    #[error("invalid random ranges: {0}")]
    InvalidRanges(String),
    #[error("invalid scenario config: {0}")]
    Config(String),
    #[error("simulated scene is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invariant(Vec<Violation>),
}
