//! Experiment description loaded from a JSON file.
//!
//! Every field has a default, so a config file only needs the keys it changes.
//! Unknown keys are rejected so that typos do not silently fall back to
//! defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::EnvConfig;
use crate::error::{Error, Result};
use crate::mobility::ScenarioKind;
use crate::par::Execution;
use crate::ppo::PpoHyperParams;

/// Full experiment description: environment, learner, seeds and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub run_id: String,
    pub output_dir: PathBuf,
    /// One independent training/evaluation run per seed.
    pub seeds: Vec<u64>,
    /// Evaluation episodes per seed.
    pub eval_episodes: usize,
    /// Evaluate with the mean action instead of sampling.
    pub eval_deterministic: bool,
    /// AoA noise standard deviations (degrees) visited by the `sweep` command.
    pub aoa_noise_sweep: Vec<f64>,
    /// Write a per-frame trace CSV during evaluation.
    pub trace: bool,
    pub execution: Execution,
    pub env: EnvConfig,
    pub ppo: PpoHyperParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::desk(ScenarioKind::StraightRandom)
    }
}

/// Training length of the desk-scale preset for a scenario.
pub fn desk_episodes(kind: ScenarioKind) -> usize {
    match kind {
        ScenarioKind::NoMove => 2_000,
        _ => 4_000,
    }
}

impl ScenarioConfig {
    /// Shortened training run that fits on a single laptop core.
    pub fn desk(kind: ScenarioKind) -> Self {
        let mut cfg = Self::full(kind);
        cfg.run_id = format!("{}-desk", kind.name());
        cfg.output_dir = PathBuf::from("runs").join(&cfg.run_id);
        cfg.ppo.episodes_total = desk_episodes(kind);
        cfg.ppo.checkpoint_every = 500;
        cfg
    }

    /// Full-length run: 12,000 episodes of 128 frames.
    pub fn full(kind: ScenarioKind) -> Self {
        let run_id = format!("{}-full", kind.name());
        Self {
            output_dir: PathBuf::from("runs").join(&run_id),
            run_id,
            seeds: vec![0, 1, 2],
            eval_episodes: 20,
            eval_deterministic: true,
            aoa_noise_sweep: vec![0.0, 1.0, 5.0, 10.0, 50.0, 100.0],
            trace: false,
            execution: Execution::Parallel,
            env: EnvConfig::for_scenario(kind),
            ppo: PpoHyperParams::default(),
        }
    }

    pub fn scenario(&self) -> ScenarioKind {
        self.env.scenario.kind
    }

    /// Read and validate a JSON config.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Switch to another mobility scenario, keeping every other setting.
    pub fn with_scenario(mut self, kind: ScenarioKind) -> Self {
        let fresh = EnvConfig::for_scenario(kind);
        self.env.scenario = fresh.scenario;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::config("seeds", "seeds must be distinct"));
        }
        if self.eval_episodes == 0 {
            return Err(Error::config("eval_episodes", "must be >= 1"));
        }
        if self.run_id.is_empty() {
            return Err(Error::config("run_id", "must not be empty"));
        }
        if let Some(bad) = self.aoa_noise_sweep.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::config(
                "aoa_noise_sweep",
                format!("noise levels must be finite and >= 0, got {bad}"),
            ));
        }
        self.env.validate()?;
        self.ppo.validate()?;
        if self.env.frames_per_episode != self.ppo.frames_per_episode {
            return Err(Error::config(
                "ppo.frames_per_episode",
                format!(
                    "must equal env.frames_per_episode ({} vs {})",
                    self.ppo.frames_per_episode, self.env.frames_per_episode
                ),
            ));
        }
        Ok(())
    }
}
