//! Episodic UAV positioning environment.
//!
//! The agent only ever sees the UAV's own position, the UEs' SINR and
//! angle-of-arrival statistics, stacked over the last `M + 1` frames. UE
//! coordinates never enter the observation.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelParams, LinkGainState};
use crate::error::{Error, Result};
use crate::link_metrics::{self, CircularStats, RadioConfig};
use crate::mobility::{self, MobilityScenario, ScenarioKind, UeKinematics};
use crate::rng::{self, SimRng, Stream};

/// How the per-UE SINRs of one frame enter the observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SinrFeature {
    /// Mean over UEs of the effective SINR in dB; one entry per frame.
    #[default]
    MeanUe,
    /// One entry per UE, in UE index order.
    PerUe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UavStart {
    /// Uniform over the arena.
    #[default]
    Random,
    /// Arena centre (used by the static baseline).
    Center,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub frames_per_episode: usize,
    /// Memory length `M`: the observation stacks the current frame and `M` past ones.
    pub memory: usize,
    /// Largest UAV displacement per frame, metres.
    pub r_max: f64,
    pub uav_altitude: f64,
    pub uav_start: UavStart,
    pub sinr_feature: SinrFeature,
    /// SINR range in dB mapped onto `[-1, 1]` in the observation.
    pub sinr_obs_range_db: [f64; 2],
    pub scenario: MobilityScenario,
    pub radio: RadioConfig,
    pub channel: ChannelParams,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self::for_scenario(ScenarioKind::NoMove)
    }
}

impl EnvConfig {
    pub fn for_scenario(kind: ScenarioKind) -> Self {
        Self {
            frames_per_episode: 128,
            memory: 4,
            r_max: 20.0,
            uav_altitude: 20.0,
            uav_start: UavStart::Random,
            sinr_feature: SinrFeature::MeanUe,
            sinr_obs_range_db: [-10.0, 30.0],
            scenario: MobilityScenario::new(kind),
            radio: RadioConfig::default(),
            channel: ChannelParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames_per_episode == 0 {
            return Err(Error::config("env.frames_per_episode", "must be >= 1"));
        }
        if !(self.r_max > 0.0) {
            return Err(Error::config("env.r_max", "must be > 0"));
        }
        if !self.uav_altitude.is_finite() {
            return Err(Error::config("env.uav_altitude", "must be finite"));
        }
        if !(self.sinr_obs_range_db[1] > self.sinr_obs_range_db[0]) {
            return Err(Error::config("env.sinr_obs_range_db", "upper bound must exceed lower"));
        }
        self.scenario.validate()?;
        self.radio.validate()?;
        self.channel.validate()?;
        if self.radio.num_ues != self.scenario.num_ues {
            return Err(Error::config(
                "env.radio.num_ues",
                format!(
                    "{} disagrees with env.scenario.num_ues = {}",
                    self.radio.num_ues, self.scenario.num_ues
                ),
            ));
        }
        if (self.uav_altitude - self.scenario.ue_height).abs() < 1e-9 {
            return Err(Error::config("env.uav_altitude", "must differ from the UE height"));
        }
        Ok(())
    }

    /// Features per frame.
    pub fn frame_width(&self) -> usize {
        match self.sinr_feature {
            SinrFeature::MeanUe => 5,
            SinrFeature::PerUe => 4 + self.radio.num_ues,
        }
    }

    pub fn observation_len(&self) -> usize {
        self.frame_width() * (self.memory + 1)
    }

    /// Analytic bounds of `R_fair`: every UE at the rate floor / every UE at the capped rate.
    pub fn reward_bounds(&self) -> RewardBounds {
        let u = self.radio.num_ues as f64;
        RewardBounds {
            min: u * self.radio.rate_floor.log10(),
            max: u * self.radio.max_rate().log10(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardBounds {
    pub min: f64,
    pub max: f64,
}

/// Min–max normalisation of `R_fair` into `[0, 1]`.
pub fn normalize_reward(r_fair: f64, bounds: RewardBounds) -> Result<f64> {
    if !(bounds.max > bounds.min) {
        return Err(Error::config(
            "reward_bounds",
            format!("degenerate bounds [{}, {}]", bounds.min, bounds.max),
        ));
    }
    Ok(((r_fair - bounds.min) / (bounds.max - bounds.min)).clamp(0.0, 1.0))
}

/// Flattened state: frames newest first, each `(x, y, sinr..., mean AoA, AoA std)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation(pub Vec<f64>);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Frame `i` (0 = current) given the per-frame width.
    pub fn frame(&self, i: usize, width: usize) -> &[f64] {
        &self.0[i * width..(i + 1) * width]
    }
}

/// Decoded UAV move: heading from east in degrees, distance in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionCommand {
    pub direction_deg: f64,
    pub magnitude: f64,
}

impl ActionCommand {
    pub const HOVER: ActionCommand = ActionCommand {
        direction_deg: 0.0,
        magnitude: 0.0,
    };
}

/// `pos + r (cos a, sin a)`, clamped to the arena.
pub fn apply_action(uav_pos: [f64; 2], action: ActionCommand, half_width: f64) -> [f64; 2] {
    let a = action.direction_deg.to_radians();
    let (s, c) = a.sin_cos();
    [
        (uav_pos[0] + action.magnitude * c).clamp(-half_width, half_width),
        (uav_pos[1] + action.magnitude * s).clamp(-half_width, half_width),
    ]
}

/// Raw metrics of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    /// 0 after reset, `t` after the `t`-th step.
    pub frame: usize,
    pub uav_position: [f64; 2],
    pub fair_rate: f64,
    pub per_ue_rate: Vec<f64>,
    pub per_ue_sinr: Vec<f64>,
    pub aoa: CircularStats,
    pub reward: f64,
}

impl StepInfo {
    /// Mean per-UE throughput of the frame, bit/s.
    pub fn mean_rate(&self) -> f64 {
        self.per_ue_rate.iter().sum::<f64>() / self.per_ue_rate.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Idle,
    Running,
    Done,
}

/// Single-UAV environment. Strictly sequential: `reset`, then `step` until done.
#[derive(Debug, Clone)]
pub struct UavEnv {
    config: EnvConfig,
    bounds: RewardBounds,
    noise_power: f64,
    tx_per_resource: f64,
    ues: Vec<UeKinematics>,
    uav: [f64; 2],
    links: Vec<LinkGainState>,
    link_rngs: Vec<SimRng>,
    mobility_rng: SimRng,
    aoa_rng: SimRng,
    history: VecDeque<Vec<f64>>,
    frame: usize,
    phase: Phase,
    last_info: Option<StepInfo>,
}

impl UavEnv {
    pub fn new(config: EnvConfig) -> Result<Self> {
        config.validate()?;
        let bounds = config.reward_bounds();
        let noise_power = config.radio.noise_power_per_resource(config.channel.num_resources);
        let tx_per_resource = config.channel.tx_power_per_resource();
        Ok(Self {
            bounds,
            noise_power,
            tx_per_resource,
            ues: Vec::new(),
            uav: [0.0; 2],
            links: Vec::new(),
            link_rngs: Vec::new(),
            mobility_rng: rng::stream(0, Stream::Mobility, 0),
            aoa_rng: rng::stream(0, Stream::Aoa, 0),
            history: VecDeque::with_capacity(config.memory + 1),
            frame: 0,
            phase: Phase::Idle,
            last_info: None,
            config,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn reward_bounds(&self) -> RewardBounds {
        self.bounds
    }

    pub fn uav_position(&self) -> [f64; 2] {
        self.uav
    }

    /// Ground truth, for tests and tracing only. Never part of the observation.
    pub fn ues(&self) -> &[UeKinematics] {
        &self.ues
    }

    pub fn last_info(&self) -> Option<&StepInfo> {
        self.last_info.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Start a new episode of the world identified by `seed`.
    pub fn reset(&mut self, seed: u64) -> Result<Observation> {
        let scenario = &self.config.scenario;
        self.mobility_rng = rng::stream(seed, Stream::Mobility, 0);
        self.aoa_rng = rng::stream(seed, Stream::Aoa, 0);
        self.ues = mobility::init_ues(scenario, &mut self.mobility_rng);

        let hw = scenario.area_half_width;
        self.uav = match self.config.uav_start {
            UavStart::Center => [0.0, 0.0],
            UavStart::Random => {
                use rand::Rng;
                let mut start = rng::stream(seed, Stream::UavStart, 0);
                [start.random_range(-hw..=hw), start.random_range(-hw..=hw)]
            }
        };

        let uav3 = self.uav_3d();
        let height = scenario.ue_height;
        self.link_rngs = (0..self.ues.len())
            .map(|u| rng::stream(seed, Stream::Link, u as u64))
            .collect();
        self.links = self
            .ues
            .iter()
            .zip(self.link_rngs.iter_mut())
            .map(|(ue, r)| LinkGainState::new(&self.config.channel, ue.position_3d(height), uav3, r))
            .collect();

        self.frame = 0;
        let info = self.measure()?;
        let features = self.frame_features(&info);
        self.history.clear();
        for _ in 0..=self.config.memory {
            self.history.push_back(features.clone());
        }
        self.last_info = Some(info);
        self.phase = Phase::Running;
        Ok(self.observation())
    }

    pub fn step(&mut self, action: ActionCommand) -> Result<StepResult> {
        match self.phase {
            Phase::Idle => return Err(Error::State("step called before reset".into())),
            Phase::Done => return Err(Error::State("step called after the episode ended".into())),
            Phase::Running => {}
        }
        if !(action.magnitude >= 0.0 && action.magnitude <= self.config.r_max) || !action.direction_deg.is_finite() {
            return Err(Error::Domain(format!(
                "action out of bounds: heading {} deg, distance {} m (r_max {})",
                action.direction_deg, action.magnitude, self.config.r_max
            )));
        }

        let scenario = &self.config.scenario;
        self.uav = apply_action(self.uav, action, scenario.area_half_width);
        mobility::step_ues(&mut self.ues, scenario, scenario.time_step, &mut self.mobility_rng);

        let uav3 = self.uav_3d();
        let height = scenario.ue_height;
        for ((link, ue), r) in self.links.iter_mut().zip(&self.ues).zip(self.link_rngs.iter_mut()) {
            link.advance(&self.config.channel, ue.position_3d(height), uav3, r);
        }

        self.frame += 1;
        let info = self.measure()?;
        let features = self.frame_features(&info);
        self.history.pop_back();
        self.history.push_front(features);

        let done = self.frame >= self.config.frames_per_episode;
        if done {
            self.phase = Phase::Done;
        }
        self.last_info = Some(info.clone());
        Ok(StepResult {
            observation: self.observation(),
            reward: info.reward,
            done,
            info,
        })
    }

    fn uav_3d(&self) -> [f64; 3] {
        [self.uav[0], self.uav[1], self.config.uav_altitude]
    }

    fn measure(&mut self) -> Result<StepInfo> {
        let cfg = &self.config;
        let height = cfg.scenario.ue_height;
        let uav3 = self.uav_3d();
        let n = self.ues.len();
        let mut per_ue_sinr = Vec::with_capacity(n);
        let mut per_ue_rate = Vec::with_capacity(n);
        let mut aoas = Vec::with_capacity(n);

        for (ue, link) in self.ues.iter().zip(&self.links) {
            let ue3 = ue.position_3d(height);
            let d = channel::distance_3d(ue3, uav3);
            let rx: Vec<f64> = channel::total_gain(link, &cfg.channel, d)?
                .into_iter()
                .map(|g| channel::received_power(self.tx_per_resource, g))
                .collect();
            let sinr = link_metrics::compute_sinr(&rx, &[], self.noise_power)?;
            let eff = link_metrics::effective_sinr(&sinr, cfg.radio.sinr_cap)?;
            per_ue_sinr.push(eff);
            per_ue_rate.push(link_metrics::ue_rate(eff, &cfg.radio));
            aoas.push(link_metrics::measure_aoa(ue3, uav3, cfg.radio.aoa_noise_std, &mut self.aoa_rng).degrees);
        }

        let fair_rate = link_metrics::fair_rate(&per_ue_rate)?;
        let aoa = link_metrics::aoa_circular_stats(&aoas, cfg.radio.aoa_std_cap)?;
        Ok(StepInfo {
            frame: self.frame,
            uav_position: self.uav,
            fair_rate,
            reward: normalize_reward(fair_rate, self.bounds)?,
            per_ue_rate,
            per_ue_sinr,
            aoa,
        })
    }

    fn frame_features(&self, info: &StepInfo) -> Vec<f64> {
        frame_features(&self.config, info.uav_position, &info.per_ue_sinr, info.aoa)
    }

    fn observation(&self) -> Observation {
        Observation(self.history.iter().flatten().copied().collect())
    }
}

fn sinr_to_unit(sinr_linear: f64, range_db: [f64; 2]) -> f64 {
    let db = channel::linear_to_db(sinr_linear.max(1e-30));
    (2.0 * (db - range_db[0]) / (range_db[1] - range_db[0]) - 1.0).clamp(-1.0, 1.0)
}

/// Normalised features of one frame.
pub fn frame_features(config: &EnvConfig, uav_position: [f64; 2], per_ue_sinr: &[f64], aoa: CircularStats) -> Vec<f64> {
    let hw = config.scenario.area_half_width;
    let mut out = Vec::with_capacity(config.frame_width());
    out.push(uav_position[0] / hw);
    out.push(uav_position[1] / hw);
    match config.sinr_feature {
        SinrFeature::MeanUe => {
            let mean_db = per_ue_sinr
                .iter()
                .map(|s| channel::linear_to_db(s.max(1e-30)))
                .sum::<f64>()
                / per_ue_sinr.len() as f64;
            let lo = config.sinr_obs_range_db[0];
            let hi = config.sinr_obs_range_db[1];
            out.push((2.0 * (mean_db - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0));
        }
        SinrFeature::PerUe => {
            out.extend(per_ue_sinr.iter().map(|&s| sinr_to_unit(s, config.sinr_obs_range_db)));
        }
    }
    out.push(aoa.mean / 180.0);
    out.push(aoa.std / config.radio.aoa_std_cap);
    out
}
