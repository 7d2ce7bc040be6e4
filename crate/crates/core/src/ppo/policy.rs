//! Tanh-squashed diagonal Gaussian policy over `(heading, distance)`.
//!
//! The actor network outputs the pre-squash means; a state-independent log-std
//! vector is learned alongside. A pre-squash sample `z` is mapped through
//! `u = tanh(z)` and decoded as `heading = 180 u_0` degrees and
//! `distance = r_max (u_1 + 1) / 2`. Log-probabilities are taken in `u` space,
//! i.e. the Gaussian density minus `sum log(1 - tanh(z)^2)`.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::environment::ActionCommand;
use crate::error::{Error, Result};
use crate::link_metrics::wrap_degrees;
use crate::neural::{Mlp, Parameters};
use crate::rng::SimRng;

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 1.0;
pub const ACTION_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolicy {
    pub actor: Mlp,
    pub log_std: Vec<f64>,
    pub r_max: f64,
}

/// Gradient of a loss w.r.t. the policy parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGrads {
    pub actor: Mlp,
    pub log_std: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySample {
    pub action: ActionCommand,
    pub raw: [f64; ACTION_DIM],
    pub log_prob: f64,
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `sum_j log(1 - tanh(z_j)^2)`, evaluated without cancellation for large `|z|`.
pub fn squash_log_correction(raw: &[f64]) -> f64 {
    raw.iter().map(|&z| 2.0 * (LN_2 - z - softplus(-2.0 * z))).sum()
}

/// Diagonal Gaussian log-density of `raw` (no squash correction).
pub fn gaussian_log_density(mean: &[f64], log_std: &[f64], raw: &[f64]) -> f64 {
    mean.iter()
        .zip(log_std)
        .zip(raw)
        .map(|((&m, &ls), &z)| {
            let k = (z - m) * (-ls).exp();
            -0.5 * k * k - ls - 0.5 * (2.0 * PI).ln()
        })
        .sum()
}

/// Entropy of the pre-squash Gaussian.
pub fn gaussian_entropy(log_std: &[f64]) -> f64 {
    log_std
        .iter()
        .map(|ls| 0.5 * (2.0 * PI * std::f64::consts::E).ln() + ls)
        .sum()
}

/// Map a pre-squash sample to a bounded UAV move.
pub fn decode_action(raw: [f64; ACTION_DIM], r_max: f64) -> ActionCommand {
    let heading = wrap_degrees(180.0 * raw[0].tanh());
    let distance = (r_max * (raw[1].tanh() + 1.0) / 2.0).clamp(0.0, r_max);
    ActionCommand {
        direction_deg: heading,
        magnitude: distance,
    }
}

impl GaussianPolicy {
    pub fn new(actor: Mlp, initial_log_std: f64, r_max: f64) -> Result<Self> {
        if actor.output_size() != ACTION_DIM {
            return Err(Error::Shape(format!(
                "actor must output {ACTION_DIM} means, has {}",
                actor.output_size()
            )));
        }
        Ok(Self {
            actor,
            log_std: vec![initial_log_std.clamp(LOG_STD_MIN, LOG_STD_MAX); ACTION_DIM],
            r_max,
        })
    }

    pub fn means(&self, observation: &[f64]) -> Result<Vec<f64>> {
        self.actor.predict(observation)
    }

    pub fn sample(&self, observation: &[f64], rng: &mut SimRng, deterministic: bool) -> Result<PolicySample> {
        let mean = self.means(observation)?;
        let mut raw = [0.0; ACTION_DIM];
        for j in 0..ACTION_DIM {
            raw[j] = if deterministic {
                mean[j]
            } else {
                mean[j] + self.log_std[j].exp() * rng.sample::<f64, _>(StandardNormal)
            };
        }
        let log_prob = gaussian_log_density(&mean, &self.log_std, &raw) - squash_log_correction(&raw);
        Ok(PolicySample {
            action: decode_action(raw, self.r_max),
            raw,
            log_prob,
        })
    }

    pub fn log_prob(&self, observation: &[f64], raw: [f64; ACTION_DIM]) -> Result<f64> {
        let mean = self.means(observation)?;
        Ok(gaussian_log_density(&mean, &self.log_std, &raw) - squash_log_correction(&raw))
    }

    pub fn clamp_log_std(&mut self) {
        for ls in &mut self.log_std {
            *ls = ls.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }

    pub fn zero_grads(&self) -> PolicyGrads {
        PolicyGrads {
            actor: self.actor.zeros_like(),
            log_std: vec![0.0; self.log_std.len()],
        }
    }
}

impl Parameters for GaussianPolicy {
    fn param_slices(&self) -> Vec<&[f64]> {
        let mut s = self.actor.param_slices();
        s.push(&self.log_std);
        s
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut s = self.actor.param_slices_mut();
        s.push(&mut self.log_std);
        s
    }
}

impl Parameters for PolicyGrads {
    fn param_slices(&self) -> Vec<&[f64]> {
        let mut s = self.actor.param_slices();
        s.push(&self.log_std);
        s
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut s = self.actor.param_slices_mut();
        s.push(&mut self.log_std);
        s
    }
}
