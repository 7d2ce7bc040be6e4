use rand::Rng;
use rand_distr::StandardNormal;

use uavppo::ppo::{
    clipped_policy_loss, ppo_update, AdvantageEstimator, PpoAgent, PpoHyperParams, RolloutBuffer, Transition,
};
use uavppo::rng::{stream, Stream};

const OBS: usize = 6;

fn hyper() -> PpoHyperParams {
    PpoHyperParams {
        hidden_sizes: vec![16, 16],
        epochs_per_update: 1,
        entropy_coef: 0.0,
        ..PpoHyperParams::default()
    }
}

fn rollout(agent: &PpoAgent, hp: &PpoHyperParams, seed: u64, len: usize) -> RolloutBuffer {
    let mut rng = stream(seed, Stream::Policy, 0);
    let mut buffer = RolloutBuffer::with_capacity(len);
    for _ in 0..len {
        let obs: Vec<f64> = (0..OBS).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = agent.act(&obs, &mut rng, false).unwrap();
        let reward = (s.action.direction_deg / 180.0 - obs[0]).abs() + 0.1 * rng.sample::<f64, _>(StandardNormal);
        buffer.push(Transition {
            value: agent.value(&obs).unwrap(),
            observation: obs,
            raw_action: s.raw,
            action: s.action,
            log_prob: s.log_prob,
            reward: -reward,
        });
    }
    buffer.finish_episode(0.0, hp).unwrap();
    buffer
}

fn normalized(adv: &[f64]) -> Vec<f64> {
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let std = (adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
    adv.iter().map(|a| (a - mean) / (std + 1e-8)).collect()
}

/// Mean clipped surrogate objective of `agent` on `buffer`.
fn surrogate(agent: &PpoAgent, buffer: &RolloutBuffer, eps: f64) -> f64 {
    let adv = normalized(buffer.advantages());
    let total: f64 = buffer
        .transitions()
        .iter()
        .zip(&adv)
        .map(|(t, a)| {
            let lp = agent.policy.log_prob(&t.observation, t.raw_action).unwrap();
            -clipped_policy_loss(lp, t.log_prob, *a, eps)
        })
        .sum();
    total / adv.len() as f64
}

#[test]
fn one_epoch_does_not_lower_the_surrogate() {
    let hp = hyper();
    let mut improved = 0;
    for trial in 0..100u64 {
        let mut init = stream(trial, Stream::Init, 0);
        let mut agent = PpoAgent::new(OBS, &hp, 20.0, &mut init).unwrap();
        let buffer = rollout(&agent, &hp, trial, 64);
        let before = surrogate(&agent, &buffer, hp.clip_epsilon);
        ppo_update(&mut agent, &buffer, &hp, &mut stream(trial, Stream::Shuffle, 0)).unwrap();
        let after = surrogate(&agent, &buffer, hp.clip_epsilon);
        if after >= before - 1e-12 {
            improved += 1;
        }
    }
    assert!(improved >= 90, "surrogate improved in only {improved} of 100 trials");
}

#[test]
fn fresh_rollouts_have_unit_ratio() {
    let hp = hyper();
    let mut init = stream(1, Stream::Init, 0);
    let agent = PpoAgent::new(OBS, &hp, 20.0, &mut init).unwrap();
    let buffer = rollout(&agent, &hp, 1, 200);
    for t in buffer.transitions() {
        let lp = agent.policy.log_prob(&t.observation, t.raw_action).unwrap();
        assert!(((lp - t.log_prob).exp() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn update_statistics_are_well_formed() {
    for advantage in [AdvantageEstimator::Gae, AdvantageEstimator::RewardMinusValue] {
        let hp = PpoHyperParams {
            epochs_per_update: 10,
            advantage,
            ..hyper()
        };
        let mut init = stream(2, Stream::Init, 0);
        let mut agent = PpoAgent::new(OBS, &hp, 20.0, &mut init).unwrap();
        for round in 0..20u64 {
            let buffer = rollout(&agent, &hp, 100 + round, 96);
            let stats = ppo_update(&mut agent, &buffer, &hp, &mut stream(round, Stream::Shuffle, 0)).unwrap();
            assert!((0.0..=1.0).contains(&stats.clip_fraction), "{stats:?}");
            assert!(stats.approx_kl >= 0.0, "{stats:?}");
            assert!(stats.value_loss >= 0.0 && stats.value_loss.is_finite(), "{stats:?}");
            assert!(stats.policy_loss.is_finite() && stats.entropy.is_finite(), "{stats:?}");
            assert!(agent
                .policy
                .log_std
                .iter()
                .all(|l| (uavppo::ppo::LOG_STD_MIN..=uavppo::ppo::LOG_STD_MAX).contains(l)));
        }
    }
}

#[test]
fn updates_are_reproducible() {
    let hp = hyper();
    let run = || {
        let mut init = stream(4, Stream::Init, 0);
        let mut agent = PpoAgent::new(OBS, &hp, 20.0, &mut init).unwrap();
        for round in 0..5u64 {
            let buffer = rollout(&agent, &hp, round, 48);
            ppo_update(&mut agent, &buffer, &hp, &mut stream(round, Stream::Shuffle, 0)).unwrap();
        }
        agent
    };
    assert_eq!(run(), run());
}
