//! Flight control for a UAV-mounted base station trained with PPO over a
//! measurement-only radio simulator.
//!
//! The crate is layered bottom-up: [`channel`] and [`link_metrics`] model the
//! radio links, [`mobility`] moves the users, [`environment`] ties them into an
//! episodic control problem, [`neural`] and [`ppo`] provide the learner and
//! [`harness`] drives training, evaluation and sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod environment;
pub mod error;
pub mod harness;
pub mod link_metrics;
pub mod mobility;
pub mod neural;
pub mod par;
pub mod ppo;
pub mod rng;

pub use error::{Error, Result};
