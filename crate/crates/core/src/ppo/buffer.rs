use crate::environment::ActionCommand;
use crate::error::{Error, Result};

use super::advantage::{compute_gae, reward_minus_value};
use super::{AdvantageEstimator, PpoHyperParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub observation: Vec<f64>,
    /// Pre-squash sample the log-probability refers to.
    pub raw_action: [f64; 2],
    pub action: ActionCommand,
    pub log_prob: f64,
    pub reward: f64,
    pub value: f64,
}

/// On-policy storage for one update. Holds one or more closed episodes.
#[derive(Debug, Clone, Default)]
pub struct RolloutBuffer {
    transitions: Vec<Transition>,
    advantages: Vec<f64>,
    returns: Vec<f64>,
    /// Index of the first transition of the episode still open.
    open_from: usize,
}

impl RolloutBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            transitions: Vec::with_capacity(n),
            advantages: Vec::with_capacity(n),
            returns: Vec::with_capacity(n),
            open_from: 0,
        }
    }

    pub fn push(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn advantages(&self) -> &[f64] {
        &self.advantages
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    /// Every transition belongs to a closed episode with advantages computed.
    pub fn is_ready(&self) -> bool {
        !self.transitions.is_empty() && self.advantages.len() == self.transitions.len()
    }

    /// Close the open episode, bootstrapping its last state with `terminal_value`.
    pub fn finish_episode(&mut self, terminal_value: f64, hp: &PpoHyperParams) -> Result<()> {
        let open = &self.transitions[self.open_from..];
        if open.is_empty() {
            return Err(Error::State("no open episode to finish".into()));
        }
        let rewards: Vec<f64> = open.iter().map(|t| t.reward).collect();
        let values: Vec<f64> = open.iter().map(|t| t.value).collect();
        let (adv, ret) = match hp.advantage {
            AdvantageEstimator::Gae => compute_gae(&rewards, &values, terminal_value, hp.discount, hp.gae_lambda),
            AdvantageEstimator::RewardMinusValue => reward_minus_value(&rewards, &values),
        };
        self.advantages.extend(adv);
        self.returns.extend(ret);
        self.open_from = self.transitions.len();
        Ok(())
    }

    pub fn clear(&mut self) {
        self.transitions.clear();
        self.advantages.clear();
        self.returns.clear();
        self.open_from = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(reward: f64, value: f64) -> Transition {
        Transition {
            observation: vec![0.0],
            raw_action: [0.0; 2],
            action: ActionCommand::HOVER,
            log_prob: 0.0,
            reward,
            value,
        }
    }

    #[test]
    fn episodes_are_closed_independently() {
        let hp = PpoHyperParams::default();
        let mut b = RolloutBuffer::new();
        b.push(t(1.0, 0.0));
        b.push(t(1.0, 0.0));
        assert!(!b.is_ready());
        b.finish_episode(0.0, &hp).unwrap();
        b.push(t(1.0, 0.0));
        b.finish_episode(0.0, &hp).unwrap();
        assert!(b.is_ready());
        assert!((b.advantages()[0] - 1.9405).abs() < 1e-12);
        assert_eq!(b.advantages()[1], 1.0);
        assert_eq!(b.advantages()[2], 1.0);
        assert!(b.finish_episode(0.0, &hp).is_err());
    }
}
