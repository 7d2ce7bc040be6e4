use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{clip_global_norm, AdamState, Mlp, Parameters};
use crate::rng::SimRng;

use super::buffer::RolloutBuffer;
use super::policy::{
    gaussian_entropy, gaussian_log_density, squash_log_correction, GaussianPolicy, PolicySample, ACTION_DIM,
};
use super::PpoHyperParams;

/// Actor, critic and their optimisers.
///
/// The critic network predicts returns divided by `return_scale`, which keeps
/// its regression targets near the reward range.
#[derive(Debug, Clone, PartialEq)]
pub struct PpoAgent {
    pub policy: GaussianPolicy,
    pub critic: Mlp,
    pub return_scale: f64,
    pub actor_opt: AdamState,
    pub critic_opt: AdamState,
}

impl PpoAgent {
    pub fn new(obs_dim: usize, hp: &PpoHyperParams, r_max: f64, rng: &mut SimRng) -> Result<Self> {
        let mut actor_sizes = vec![obs_dim];
        actor_sizes.extend(&hp.hidden_sizes);
        let mut critic_sizes = actor_sizes.clone();
        actor_sizes.push(ACTION_DIM);
        critic_sizes.push(1);

        let actor = Mlp::new(&actor_sizes, 0.01, rng)?;
        let critic = Mlp::new(&critic_sizes, 1.0, rng)?;
        let policy = GaussianPolicy::new(actor, hp.initial_log_std, r_max)?;
        let actor_opt = AdamState::new(&policy, hp.learning_rate);
        let critic_opt = AdamState::new(&critic, hp.learning_rate);
        Ok(Self {
            policy,
            critic,
            return_scale: return_scale(hp),
            actor_opt,
            critic_opt,
        })
    }

    pub fn obs_dim(&self) -> usize {
        self.critic.input_size()
    }

    pub fn act(&self, observation: &[f64], rng: &mut SimRng, deterministic: bool) -> Result<PolicySample> {
        self.policy.sample(observation, rng, deterministic)
    }

    pub fn value(&self, observation: &[f64]) -> Result<f64> {
        Ok(self.return_scale * self.critic.predict(observation)?[0])
    }
}

/// Effective horizon of the discounted return: `1 / (1 - discount)`, or the
/// episode length when rewards are not discounted.
pub fn return_scale(hp: &PpoHyperParams) -> f64 {
    if hp.discount < 1.0 {
        1.0 / (1.0 - hp.discount)
    } else {
        hp.frames_per_episode.max(1) as f64
    }
}

/// Diagnostics of one update, averaged over every minibatch step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub policy_loss: f64,
    /// Measured on returns divided by the agent's return scale.
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

/// Per-transition clipped loss `-min(r A, clip(r, 1-eps, 1+eps) A)`, `r = exp(lp_new - lp_old)`.
pub fn clipped_policy_loss(log_prob_new: f64, log_prob_old: f64, advantage: f64, epsilon: f64) -> f64 {
    let ratio = (log_prob_new - log_prob_old).exp();
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon);
    -(ratio * advantage).min(clipped * advantage)
}

/// Mean squared error.
pub fn value_loss(predicted: &[f64], returns: &[f64]) -> Result<f64> {
    if predicted.len() != returns.len() || predicted.is_empty() {
        return Err(Error::Shape(format!(
            "value loss over {} predictions and {} returns",
            predicted.len(),
            returns.len()
        )));
    }
    Ok(predicted
        .iter()
        .zip(returns)
        .map(|(p, r)| (p - r) * (p - r))
        .sum::<f64>()
        / predicted.len() as f64)
}

/// Batch-mean clipped loss and its gradient w.r.t. the actor outputs and log-std.
#[derive(Debug, Clone)]
pub struct SurrogateGrad {
    pub loss: f64,
    pub d_means: Array2<f64>,
    pub d_log_std: Vec<f64>,
    pub clip_fraction: f64,
    pub approx_kl: f64,
}

pub fn clipped_surrogate_grad(
    means: ArrayView2<f64>,
    log_std: &[f64],
    raw: &[[f64; ACTION_DIM]],
    old_log_prob: &[f64],
    advantages: &[f64],
    epsilon: f64,
) -> SurrogateGrad {
    let b = means.nrows();
    let inv_b = 1.0 / b as f64;
    let inv_var: Vec<f64> = log_std.iter().map(|ls| (-2.0 * ls).exp()).collect();
    let mut d_means = Array2::zeros((b, ACTION_DIM));
    let mut d_log_std = vec![0.0; ACTION_DIM];
    let (mut loss, mut clipped, mut kl) = (0.0, 0usize, 0.0);

    for i in 0..b {
        let mean = means.row(i);
        let mean = mean.as_slice().expect("contiguous row");
        let lp = gaussian_log_density(mean, log_std, &raw[i]) - squash_log_correction(&raw[i]);
        let log_ratio = lp - old_log_prob[i];
        let ratio = log_ratio.exp();
        let a = advantages[i];
        let unclipped = ratio * a;
        let bounded = ratio.clamp(1.0 - epsilon, 1.0 + epsilon) * a;
        loss -= unclipped.min(bounded) * inv_b;
        if (ratio - 1.0).abs() > epsilon {
            clipped += 1;
        }
        kl += (ratio - 1.0 - log_ratio) * inv_b;

        // The clipped branch is flat in the parameters.
        if unclipped <= bounded {
            let d_lp = -ratio * a * inv_b;
            for j in 0..ACTION_DIM {
                let diff = raw[i][j] - mean[j];
                d_means[[i, j]] = d_lp * diff * inv_var[j];
                d_log_std[j] += d_lp * (diff * diff * inv_var[j] - 1.0);
            }
        }
    }
    SurrogateGrad {
        loss,
        d_means,
        d_log_std,
        clip_fraction: clipped as f64 * inv_b,
        approx_kl: kl,
    }
}

fn normalized(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    values.iter().map(|v| (v - mean) / (std + 1e-8)).collect()
}

/// Several epochs of shuffled minibatch updates on a filled buffer.
pub fn ppo_update(
    agent: &mut PpoAgent,
    buffer: &RolloutBuffer,
    hp: &PpoHyperParams,
    rng: &mut SimRng,
) -> Result<UpdateStats> {
    if buffer.is_empty() {
        return Err(Error::State("ppo update on an empty buffer".into()));
    }
    if !buffer.is_ready() {
        return Err(Error::State("ppo update before advantages were computed".into()));
    }
    let transitions = buffer.transitions();
    let n = transitions.len();
    let obs_dim = agent.obs_dim();
    if let Some(bad) = transitions.iter().find(|t| t.observation.len() != obs_dim) {
        return Err(Error::Shape(format!(
            "buffer observation of length {} for a network with {obs_dim} inputs",
            bad.observation.len()
        )));
    }
    let advantages = if hp.normalize_advantages {
        normalized(buffer.advantages())
    } else {
        buffer.advantages().to_vec()
    };
    let returns = buffer.returns();

    let mut order: Vec<usize> = (0..n).collect();
    let mut stats = UpdateStats::default();
    let mut steps = 0usize;

    for _ in 0..hp.epochs_per_update {
        order.shuffle(rng);
        for chunk in order.chunks(hp.minibatch_size) {
            let b = chunk.len();
            let mut x = Array2::zeros((b, obs_dim));
            for (row, &i) in chunk.iter().enumerate() {
                x.row_mut(row)
                    .as_slice_mut()
                    .expect("contiguous row")
                    .copy_from_slice(&transitions[i].observation);
            }
            let raw: Vec<[f64; ACTION_DIM]> = chunk.iter().map(|&i| transitions[i].raw_action).collect();
            let old_lp: Vec<f64> = chunk.iter().map(|&i| transitions[i].log_prob).collect();
            let adv: Vec<f64> = chunk.iter().map(|&i| advantages[i]).collect();
            let ret: Vec<f64> = chunk.iter().map(|&i| returns[i] / agent.return_scale).collect();

            // Actor.
            let (means, actor_cache) = agent.policy.actor.forward_batch(x.view())?;
            let sur = clipped_surrogate_grad(
                means.view(),
                &agent.policy.log_std,
                &raw,
                &old_lp,
                &adv,
                hp.clip_epsilon,
            );
            let entropy = gaussian_entropy(&agent.policy.log_std);
            let mut grads = super::PolicyGrads {
                actor: agent.policy.actor.backward(&actor_cache, sur.d_means.view())?,
                log_std: sur.d_log_std.iter().map(|g| g - hp.entropy_coef).collect(),
            };
            clip_global_norm(&mut grads.param_slices_mut(), hp.max_grad_norm);
            agent
                .actor_opt
                .step(&mut agent.policy.param_slices_mut(), &grads.param_slices())?;
            agent.policy.clamp_log_std();

            // Critic.
            let (values, critic_cache) = agent.critic.forward_batch(x.view())?;
            let predicted: Vec<f64> = values.column(0).to_vec();
            let v_loss = value_loss(&predicted, &ret)?;
            let scale = hp.value_coef * 2.0 / b as f64;
            let d_values = Array2::from_shape_fn((b, 1), |(i, _)| scale * (predicted[i] - ret[i]));
            let mut critic_grads = agent.critic.backward(&critic_cache, d_values.view())?;
            clip_global_norm(&mut critic_grads.param_slices_mut(), hp.max_grad_norm);
            agent.critic_opt.update(&mut agent.critic, &critic_grads)?;

            stats.policy_loss += sur.loss;
            stats.value_loss += v_loss;
            stats.entropy += entropy;
            stats.approx_kl += sur.approx_kl;
            stats.clip_fraction += sur.clip_fraction;
            steps += 1;
        }
    }

    let k = steps as f64;
    stats.policy_loss /= k;
    stats.value_loss /= k;
    stats.entropy /= k;
    stats.approx_kl /= k;
    stats.clip_fraction /= k;
    Ok(stats)
}
