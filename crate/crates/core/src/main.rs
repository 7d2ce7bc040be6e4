use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use uavppo::harness::{
    run_eval, run_noise_sweep, run_static_baseline, run_train, RunOptions, RunSummary, ScenarioConfig,
};
use uavppo::mobility::ScenarioKind;
use uavppo::par::Execution;

/// Train and evaluate PPO flight controllers for a UAV base station.
#[derive(Parser)]
#[command(name = "uavppo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one policy per seed, then evaluate it.
    Train(Common),
    /// Evaluate stored policies.
    Eval(Common),
    /// Evaluate a UAV hovering at the arena center.
    Baseline(Common),
    /// Throughput across AoA noise levels (eval-only with --checkpoint, else trains per level).
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; defaults to the desk-scale preset of --scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mobility scenario, e.g. no_move, straight_random, circular, straight_90, straight_180, hotspot_random.
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Run seed; repeat for several seeds. Replaces the config's seed list.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training episodes for train/sweep, evaluation episodes for eval/baseline.
    #[arg(long)]
    episodes: Option<usize>,
    /// Evaluation episodes per seed for train/sweep.
    #[arg(long)]
    eval_episodes: Option<usize>,
    /// Checkpoint file, or a training output directory with seed_<n>/checkpoint.bin.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Evaluate with mean actions and run single-threaded.
    #[arg(long)]
    deterministic: bool,
    /// Write per-frame trace files during evaluation.
    #[arg(long)]
    trace: bool,
    /// Replace an existing, non-empty output directory.
    #[arg(long)]
    overwrite: bool,
}

impl Common {
    fn config(&self, evaluates_only: bool) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
            None => ScenarioConfig::desk(self.scenario.unwrap_or(ScenarioKind::StraightRandom)),
        };
        if let (Some(kind), Some(_)) = (self.scenario, &self.config) {
            cfg = cfg.with_scenario(kind);
        }
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        match (self.episodes, evaluates_only) {
            (Some(n), true) => cfg.eval_episodes = n,
            (Some(n), false) => cfg.ppo.episodes_total = n,
            (None, _) => {}
        }
        if let Some(n) = self.eval_episodes {
            cfg.eval_episodes = n;
        }
        if self.deterministic {
            cfg.eval_deterministic = true;
            cfg.execution = Execution::Sequential;
        }
        cfg.trace |= self.trace;
        cfg.validate()?;
        Ok(cfg)
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            overwrite: self.overwrite,
            checkpoint: self.checkpoint.clone(),
        }
    }
}

fn report(summary: &RunSummary) {
    for s in &summary.per_seed {
        println!(
            "seed {:>4}: mean throughput {:.4} Mbps, mean reward {:.4}",
            s.seed,
            s.eval_mean_throughput_bps / 1e6,
            s.eval_mean_reward
        );
    }
    println!(
        "{} {}: {:.4} ± {:.4} Mbps over {} seed(s) in {:.1} s",
        summary.command,
        summary.scenario,
        summary.eval_mean_throughput_bps / 1e6,
        summary.eval_std_throughput_bps / 1e6,
        summary.seeds.len(),
        summary.wall_clock_s
    );
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Train(c) => {
            let cfg = c.config(false)?;
            report(&run_train(&cfg, &c.options())?);
            println!("outputs in {}", cfg.output_dir.display());
        }
        Command::Eval(c) => {
            if c.checkpoint.is_none() {
                anyhow::bail!("eval needs --checkpoint");
            }
            let cfg = c.config(true)?;
            report(&run_eval(&cfg, &c.options())?);
        }
        Command::Baseline(c) => {
            let cfg = c.config(true)?;
            report(&run_static_baseline(&cfg, &c.options())?);
        }
        Command::Sweep(c) => {
            let cfg = c.config(false)?;
            for p in run_noise_sweep(&cfg, &c.options())? {
                println!(
                    "noise std {:>6.1} deg: {:.4} ± {:.4} Mbps",
                    p.noise_std_deg,
                    p.mean_throughput_bps / 1e6,
                    p.std_throughput_bps / 1e6
                );
            }
            println!("sweep table in {}", cfg.output_dir.join("sweep.csv").display());
        }
    }
    Ok(())
}
