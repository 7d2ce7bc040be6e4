//! Proximal policy optimisation over the continuous `(heading, distance)` action.

mod advantage;
mod buffer;
mod learner;
mod policy;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use advantage::{compute_gae, reward_minus_value};
pub use buffer::{RolloutBuffer, Transition};
pub use learner::{
    clipped_policy_loss, clipped_surrogate_grad, ppo_update, return_scale, value_loss, PpoAgent, UpdateStats,
};
pub use policy::{
    decode_action, gaussian_entropy, gaussian_log_density, squash_log_correction, GaussianPolicy, PolicyGrads,
    PolicySample, ACTION_DIM, LOG_STD_MAX, LOG_STD_MIN,
};

/// Advantage estimator used when an episode is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AdvantageEstimator {
    /// Generalised advantage estimation with `gae_lambda`.
    #[default]
    Gae,
    /// One-step `r_t - V(s_t)` with no bootstrapping.
    RewardMinusValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoHyperParams {
    /// Discount factor gamma.
    pub discount: f64,
    /// GAE lambda.
    pub gae_lambda: f64,
    /// Surrogate clip epsilon.
    pub clip_epsilon: f64,
    /// Adam step size at the first episode.
    pub learning_rate: f64,
    /// Decay the step size linearly towards zero over `episodes_total`.
    pub anneal_learning_rate: bool,
    pub epochs_per_update: usize,
    pub minibatch_size: usize,
    pub value_coef: f64,
    pub entropy_coef: f64,
    /// Global L2 norm gradients are clipped to, per network.
    pub max_grad_norm: f64,
    pub episodes_total: usize,
    pub frames_per_episode: usize,
    pub hidden_sizes: Vec<usize>,
    pub initial_log_std: f64,
    pub advantage: AdvantageEstimator,
    pub normalize_advantages: bool,
    /// Bootstrap the last state of a time-limited episode with the critic; zero otherwise.
    pub bootstrap_time_limit: bool,
    /// Episodes between checkpoint writes; 0 writes only the final checkpoint.
    pub checkpoint_every: usize,
}

impl Default for PpoHyperParams {
    fn default() -> Self {
        Self {
            discount: 0.99,
            gae_lambda: 0.95,
            clip_epsilon: 0.2,
            learning_rate: 3e-4,
            anneal_learning_rate: true,
            epochs_per_update: 4,
            minibatch_size: 32,
            value_coef: 0.5,
            entropy_coef: 0.01,
            max_grad_norm: 1.0,
            episodes_total: 12_000,
            frames_per_episode: 128,
            hidden_sizes: vec![128, 128, 128],
            initial_log_std: -0.5,
            advantage: AdvantageEstimator::Gae,
            normalize_advantages: true,
            bootstrap_time_limit: true,
            checkpoint_every: 500,
        }
    }
}

impl PpoHyperParams {
    /// Step size used for the update that follows episode `episode` (0-based).
    pub fn learning_rate_at(&self, episode: usize) -> f64 {
        if self.anneal_learning_rate && self.episodes_total > 0 {
            let remaining = self.episodes_total.saturating_sub(episode) as f64;
            self.learning_rate * remaining / self.episodes_total as f64
        } else {
            self.learning_rate
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.discount) {
            return Err(Error::config("ppo.discount", "must lie in [0, 1]"));
        }
        if !unit(self.gae_lambda) {
            return Err(Error::config("ppo.gae_lambda", "must lie in [0, 1]"));
        }
        if !(self.clip_epsilon > 0.0) {
            return Err(Error::config("ppo.clip_epsilon", "must be > 0"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("ppo.learning_rate", "must be > 0"));
        }
        if self.epochs_per_update == 0 {
            return Err(Error::config("ppo.epochs_per_update", "must be >= 1"));
        }
        if self.minibatch_size == 0 {
            return Err(Error::config("ppo.minibatch_size", "must be >= 1"));
        }
        if !(self.value_coef >= 0.0) || !(self.entropy_coef >= 0.0) {
            return Err(Error::config("ppo.value_coef", "loss coefficients must be >= 0"));
        }
        if !(self.max_grad_norm > 0.0) {
            return Err(Error::config("ppo.max_grad_norm", "must be > 0"));
        }
        if self.episodes_total == 0 {
            return Err(Error::config("ppo.episodes_total", "must be >= 1"));
        }
        if self.frames_per_episode == 0 {
            return Err(Error::config("ppo.frames_per_episode", "must be >= 1"));
        }
        if self.hidden_sizes.contains(&0) {
            return Err(Error::config("ppo.hidden_sizes", "layer widths must be >= 1"));
        }
        if !(LOG_STD_MIN..=LOG_STD_MAX).contains(&self.initial_log_std) {
            return Err(Error::config("ppo.initial_log_std", "must lie in [-5, 1]"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_size_decays_linearly_to_one_episode_worth() {
        let hp = PpoHyperParams {
            episodes_total: 4,
            ..PpoHyperParams::default()
        };
        let lrs: Vec<f64> = (0..4).map(|ep| hp.learning_rate_at(ep)).collect();
        assert_eq!(lrs, [3e-4, 3e-4 * 0.75, 3e-4 * 0.5, 3e-4 * 0.25]);
        let flat = PpoHyperParams {
            anneal_learning_rate: false,
            ..hp
        };
        assert!((0..4).all(|ep| flat.learning_rate_at(ep) == 3e-4));
    }
}
