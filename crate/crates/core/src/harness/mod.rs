//! Experiment harness: configs, runs, metric files and checkpoints.

pub mod checkpoint;
pub mod config;
pub mod metrics;
pub mod runner;

pub use checkpoint::Checkpoint;
pub use config::ScenarioConfig;
pub use runner::{
    evaluate_seed, run_eval, run_noise_sweep, run_static_baseline, run_train, train_seed, train_seed_until, Controller,
    EpisodeStats, RunOptions, RunSummary, SweepPoint,
};
