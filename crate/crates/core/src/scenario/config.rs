use serde::{Deserialize, Serialize};

use super::random::{random_scenario, RandomRanges};
use super::rig::surround_rig;
use super::script::{simulate_with, Scenario};
use super::ScriptError;
use crate::scene::{CameraRig, ClassRegistry, Scene};

pub const SCENARIO_FORMAT: &str = "physica-scenario/1";

/// Image size of the built-in six-camera surround rig.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigPreset {
    pub width: u32,
    pub height: u32,
}

/// On-disk scenario description: exactly one of `script` or `random`, and
/// exactly one of `cameras` or `rig`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomRanges>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cameras: Option<Vec<CameraRig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rig: Option<RigPreset>,
}

pub fn parse_scenario_config(bytes: &[u8]) -> Result<ScenarioConfig, ScriptError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ScriptError::Config(format!("{path}: {}", e.into_inner()))
    })?;
    if cfg.format != SCENARIO_FORMAT {
        return Err(ScriptError::Config(format!("format must be {SCENARIO_FORMAT:?}, got {:?}", cfg.format)));
    }
    if cfg.script.is_some() == cfg.random.is_some() {
        return Err(ScriptError::Config("exactly one of `script` or `random` is required".into()));
    }
    if cfg.cameras.is_some() == cfg.rig.is_some() {
        return Err(ScriptError::Config("exactly one of `cameras` or `rig` is required".into()));
    }
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn cameras(&self) -> Vec<CameraRig> {
        match (&self.cameras, self.rig) {
            (Some(c), _) => c.clone(),
            (None, Some(r)) => surround_rig(r.width, r.height),
            (None, None) => Vec::new(),
        }
    }

    /// Resolves the script (sampling it if needed) with `seed` taking
    /// precedence over the file's seed, which defaults to 0.
    pub fn scenario(&self, seed: Option<u64>) -> Result<Scenario, ScriptError> {
        let seed = seed.or(self.seed).unwrap_or(0);
        match (&self.script, &self.random) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(r)) => random_scenario(r, seed),
            (None, None) => Err(ScriptError::Config("no scenario given".into())),
        }
    }

    pub fn build(&self, seed: Option<u64>, registry: &ClassRegistry) -> Result<Scene, ScriptError> {
        let scenario = self.scenario(seed)?;
        simulate_with(&scenario, &self.cameras(), seed.or(self.seed).unwrap_or(0), registry)
    }
}
