//! Training, evaluation, static-baseline and noise-sweep runs.
//!
//! Seeds are independent and run through [`crate::par`]. Each seed owns the
//! directory `seed_<n>/` below the run's output directory; aggregate results
//! go to `summary.json` (and `sweep.csv` for sweeps) at the top level.
//!
//! World seeds for training episode `e` and evaluation episode `e` come from
//! disjoint derivations of the run seed. Evaluation worlds depend only on the
//! run seed and the episode index, so a policy and the static baseline are
//! always compared on the same user trajectories and channel draws.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::config::ScenarioConfig;
use super::metrics::{
    prepare_output_dir, CsvWriter, JsonlWriter, EVAL_SCHEMA, METRICS_SCHEMA, SWEEP_SCHEMA, TRACE_SCHEMA,
};
use crate::environment::{ActionCommand, StepInfo, UavEnv, UavStart};
use crate::error::{Error, Result};
use crate::mobility::ScenarioKind;
use crate::par;
use crate::ppo::{ppo_update, PpoAgent, RolloutBuffer, Transition, UpdateStats};
use crate::rng::{derive_seed, stream, Stream};

pub const SUMMARY_SCHEMA: &str = "uavppo.summary/1";

const TRAIN_WORLDS: u64 = 0x7452_4149_4e00_0001;
const EVAL_WORLDS: u64 = 0x4556_414c_0000_0002;

pub fn train_world_seed(seed: u64, episode: u64) -> u64 {
    derive_seed(derive_seed(seed, TRAIN_WORLDS), episode)
}

pub fn eval_world_seed(seed: u64, episode: u64) -> u64 {
    derive_seed(derive_seed(seed, EVAL_WORLDS), episode)
}

pub fn seed_dir(root: &Path, seed: u64) -> PathBuf {
    root.join(format!("seed_{seed}"))
}

/// A checkpoint path may name a file or a training output directory holding `seed_<n>/checkpoint.bin`.
pub fn resolve_checkpoint(path: &Path, seed: u64) -> PathBuf {
    if path.is_dir() {
        seed_dir(path, seed).join("checkpoint.bin")
    } else {
        path.to_path_buf()
    }
}

/// Frame-averaged results of one episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub episode: usize,
    /// Mean per-UE rate over frames, bit/s.
    pub mean_throughput_bps: f64,
    pub mean_reward: f64,
    pub mean_fair_rate: f64,
}

/// One line of `metrics.jsonl`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    #[serde(flatten)]
    pub episode: EpisodeStats,
    #[serde(flatten)]
    pub update: UpdateStats,
}

/// Who flies the UAV during an episode.
#[derive(Debug, Clone, Copy)]
pub enum Controller<'a> {
    Policy {
        agent: &'a PpoAgent,
        deterministic: bool,
    },
    /// Stay put at the start position.
    Hover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub eval_mean_throughput_bps: f64,
    pub eval_mean_reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub mean_throughput_bps: f64,
    pub mean_reward: f64,
}

/// Aggregate outcome of a command, written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema: String,
    pub command: String,
    pub run_id: String,
    pub scenario: ScenarioKind,
    pub seeds: Vec<u64>,
    pub episodes_trained: usize,
    /// Training curve averaged over seeds; empty for evaluation-only commands.
    pub train_curve: Vec<CurvePoint>,
    pub per_seed: Vec<SeedResult>,
    pub eval_mean_throughput_bps: f64,
    /// Sample standard deviation across seeds (0 for a single seed).
    pub eval_std_throughput_bps: f64,
    pub eval_mean_reward: f64,
    pub wall_clock_s: f64,
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub noise_std_deg: f64,
    pub mean_throughput_bps: f64,
    pub std_throughput_bps: f64,
    pub per_seed_bps: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub overwrite: bool,
    /// Resume training (or, for `eval`/`sweep`, load the policy) from this checkpoint.
    pub checkpoint: Option<PathBuf>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// Play one episode. `on_step` sees every frame's measurements.
pub fn run_episode(
    env: &mut UavEnv,
    controller: Controller<'_>,
    world_seed: u64,
    policy_seed: u64,
    episode: usize,
    mut on_step: impl FnMut(&StepInfo) -> Result<()>,
) -> Result<EpisodeStats> {
    let mut rng = stream(policy_seed, Stream::Policy, episode as u64);
    let mut obs = env.reset(world_seed)?;
    let (mut thr, mut rew, mut fair, mut n) = (0.0, 0.0, 0.0, 0usize);
    loop {
        let action = match controller {
            Controller::Policy { agent, deterministic } => agent.act(obs.as_slice(), &mut rng, deterministic)?.action,
            Controller::Hover => ActionCommand::HOVER,
        };
        let step = env.step(action)?;
        on_step(&step.info)?;
        thr += step.info.mean_rate();
        rew += step.reward;
        fair += step.info.fair_rate;
        n += 1;
        obs = step.observation;
        if step.done {
            break;
        }
    }
    let n = n as f64;
    Ok(EpisodeStats {
        episode,
        mean_throughput_bps: thr / n,
        mean_reward: rew / n,
        mean_fair_rate: fair / n,
    })
}

/// Learner state and training curve of one seed.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub seed: u64,
    pub agent: PpoAgent,
    pub curve: Vec<EpisodeStats>,
}

/// Train one seed, optionally from a checkpoint. With `dir` set, writes
/// `metrics.jsonl` and `checkpoint.bin` there.
pub fn train_seed(
    cfg: &ScenarioConfig,
    seed: u64,
    resume: Option<Checkpoint>,
    dir: Option<&Path>,
) -> Result<TrainOutcome> {
    train_seed_until(cfg, seed, resume, dir, cfg.ppo.episodes_total)
}

/// Like [`train_seed`], but stops once `stop` episodes are done. The step-size
/// schedule still follows `episodes_total`, so a run stopped here and resumed
/// from its checkpoint matches one that was never stopped.
pub fn train_seed_until(
    cfg: &ScenarioConfig,
    seed: u64,
    resume: Option<Checkpoint>,
    dir: Option<&Path>,
    stop: usize,
) -> Result<TrainOutcome> {
    let hp = &cfg.ppo;
    if stop > hp.episodes_total {
        return Err(Error::Config {
            field: "stop".into(),
            reason: format!("{stop} exceeds episodes_total {}", hp.episodes_total),
        });
    }
    let obs_dim = cfg.env.observation_len();
    let (mut agent, start) = match resume {
        Some(ck) => {
            ck.check_dimensions(obs_dim, &hp.hidden_sizes, cfg.env.r_max)?;
            if ck.seed != seed {
                return Err(Error::Checkpoint(format!(
                    "checkpoint belongs to seed {}, not {seed}",
                    ck.seed
                )));
            }
            (ck.agent, ck.episodes_done as usize)
        }
        None => {
            let mut init = stream(seed, Stream::Init, 0);
            (PpoAgent::new(obs_dim, hp, cfg.env.r_max, &mut init)?, 0)
        }
    };
    if start > stop {
        return Err(Error::Checkpoint(format!(
            "checkpoint is at episode {start}, beyond the last episode {stop}"
        )));
    }

    let mut metrics = match dir {
        Some(d) => Some(JsonlWriter::create(
            &d.join("metrics.jsonl"),
            METRICS_SCHEMA,
            serde_json::json!({
                "run_id": cfg.run_id,
                "seed": seed,
                "scenario": cfg.scenario().name(),
                "start_episode": start,
                "episodes_total": hp.episodes_total,
            }),
        )?),
        None => None,
    };
    let save = |agent: &PpoAgent, done: usize| -> Result<()> {
        if let Some(d) = dir {
            Checkpoint {
                seed,
                episodes_done: done as u64,
                agent: agent.clone(),
            }
            .save(&d.join("checkpoint.bin"))?;
        }
        Ok(())
    };

    let mut env = UavEnv::new(cfg.env.clone())?;
    let mut buffer = RolloutBuffer::with_capacity(hp.frames_per_episode);
    let mut curve = Vec::with_capacity(stop - start);
    for ep in start..stop {
        buffer.clear();
        let mut policy_rng = stream(seed, Stream::Policy, ep as u64);
        let mut obs = env.reset(train_world_seed(seed, ep as u64))?;
        let (mut thr, mut rew, mut fair) = (0.0, 0.0, 0.0);
        loop {
            let sample = agent.act(obs.as_slice(), &mut policy_rng, false)?;
            let value = agent.value(obs.as_slice())?;
            let step = env.step(sample.action)?;
            thr += step.info.mean_rate();
            rew += step.reward;
            fair += step.info.fair_rate;
            buffer.push(Transition {
                observation: obs.0,
                raw_action: sample.raw,
                action: sample.action,
                log_prob: sample.log_prob,
                reward: step.reward,
                value,
            });
            obs = step.observation;
            if step.done {
                break;
            }
        }
        let terminal = if hp.bootstrap_time_limit {
            agent.value(obs.as_slice())?
        } else {
            0.0
        };
        buffer.finish_episode(terminal, hp)?;
        let lr = hp.learning_rate_at(ep);
        agent.actor_opt.learning_rate = lr;
        agent.critic_opt.learning_rate = lr;
        let mut shuffle_rng = stream(seed, Stream::Shuffle, ep as u64);
        let update = ppo_update(&mut agent, &buffer, hp, &mut shuffle_rng)?;

        let n = buffer.len() as f64;
        let stats = EpisodeStats {
            episode: ep,
            mean_throughput_bps: thr / n,
            mean_reward: rew / n,
            mean_fair_rate: fair / n,
        };
        if let Some(m) = metrics.as_mut() {
            m.write(&TrainRecord { episode: stats, update })?;
        }
        curve.push(stats);
        let done = ep + 1;
        if hp.checkpoint_every > 0 && done % hp.checkpoint_every == 0 && done < stop {
            save(&agent, done)?;
        }
    }
    save(&agent, stop)?;
    Ok(TrainOutcome { seed, agent, curve })
}

/// Evaluate a controller on the seed's evaluation worlds. With `dir` set,
/// writes `eval.csv` and, if tracing is on, one `trace_epNNNN.csv` per episode.
pub fn evaluate_seed(
    cfg: &ScenarioConfig,
    seed: u64,
    controller: Controller<'_>,
    dir: Option<&Path>,
) -> Result<Vec<EpisodeStats>> {
    let trace = cfg.trace && dir.is_some();
    let policy_seed = derive_seed(seed, EVAL_WORLDS);
    let episodes = par::map_indexed(cfg.eval_episodes, cfg.execution, |ep| {
        let mut env = UavEnv::new(cfg.env.clone())?;
        let mut rows = Vec::new();
        let stats = run_episode(
            &mut env,
            controller,
            eval_world_seed(seed, ep as u64),
            policy_seed,
            ep,
            |info| {
                if trace {
                    let mut row = vec![info.frame as f64, info.uav_position[0], info.uav_position[1]];
                    row.push(info.fair_rate);
                    row.extend(&info.per_ue_rate);
                    row.push(info.reward);
                    rows.push(row);
                }
                Ok(())
            },
        )?;
        Ok((stats, rows))
    });
    let episodes = collect(episodes)?;

    if let Some(d) = dir {
        let header: Vec<String> = ["episode", "mean_throughput_bps", "mean_reward"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut eval = CsvWriter::create(&d.join("eval.csv"), EVAL_SCHEMA, &header)?;
        for (s, _) in &episodes {
            eval.write_row(&[s.episode as f64, s.mean_throughput_bps, s.mean_reward])?;
        }
        if trace {
            let header = trace_header(cfg.env.radio.num_ues);
            for (stats, rows) in &episodes {
                let mut w = CsvWriter::create(&trace_path(d, stats.episode), TRACE_SCHEMA, &header)?;
                for row in rows {
                    w.write_row(row)?;
                }
            }
        }
    }
    Ok(episodes.into_iter().map(|(s, _)| s).collect())
}

/// Columns of a per-episode trace file.
pub fn trace_header(num_ues: usize) -> Vec<String> {
    let mut header: Vec<String> = ["frame", "uav_x", "uav_y", "fair_rate"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..num_ues).map(|u| format!("rate_ue{u}")));
    header.push("reward".into());
    header
}

pub fn trace_path(seed_dir: &Path, episode: usize) -> PathBuf {
    seed_dir.join(format!("trace_ep{episode:04}.csv"))
}

fn seed_result(seed: u64, episodes: &[EpisodeStats]) -> SeedResult {
    let n = episodes.len() as f64;
    SeedResult {
        seed,
        eval_mean_throughput_bps: episodes.iter().map(|e| e.mean_throughput_bps).sum::<f64>() / n,
        eval_mean_reward: episodes.iter().map(|e| e.mean_reward).sum::<f64>() / n,
    }
}

fn summarize(
    cfg: &ScenarioConfig,
    command: &str,
    episodes_trained: usize,
    curves: &[Vec<EpisodeStats>],
    per_seed: Vec<SeedResult>,
    started: Instant,
) -> RunSummary {
    let train_curve = match curves.first() {
        Some(first) => (0..first.len())
            .map(|i| {
                let k = curves.len() as f64;
                CurvePoint {
                    episode: first[i].episode,
                    mean_throughput_bps: curves.iter().map(|c| c[i].mean_throughput_bps).sum::<f64>() / k,
                    mean_reward: curves.iter().map(|c| c[i].mean_reward).sum::<f64>() / k,
                }
            })
            .collect(),
        None => Vec::new(),
    };
    let thr: Vec<f64> = per_seed.iter().map(|s| s.eval_mean_throughput_bps).collect();
    let (eval_mean, eval_std) = mean_std(&thr);
    let eval_reward = per_seed.iter().map(|s| s.eval_mean_reward).sum::<f64>() / per_seed.len() as f64;
    RunSummary {
        schema: SUMMARY_SCHEMA.into(),
        command: command.into(),
        run_id: cfg.run_id.clone(),
        scenario: cfg.scenario(),
        seeds: cfg.seeds.clone(),
        episodes_trained,
        train_curve,
        per_seed,
        eval_mean_throughput_bps: eval_mean,
        eval_std_throughput_bps: eval_std,
        eval_mean_reward: eval_reward,
        wall_clock_s: started.elapsed().as_secs_f64(),
    }
}

fn write_summary(dir: &Path, summary: &RunSummary) -> Result<()> {
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(summary).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

fn start_run(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<()> {
    cfg.validate()?;
    prepare_output_dir(&cfg.output_dir, opts.overwrite)?;
    for &seed in &cfg.seeds {
        let d = seed_dir(&cfg.output_dir, seed);
        std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let path = cfg.output_dir.join("config.json");
    std::fs::write(&path, cfg.to_json() + "\n").map_err(|e| Error::io(&path, e))
}

fn load_agents(cfg: &ScenarioConfig, checkpoint: &Path) -> Result<Vec<PpoAgent>> {
    cfg.seeds
        .iter()
        .map(|&seed| {
            let ck = Checkpoint::load(&resolve_checkpoint(checkpoint, seed))?;
            ck.check_dimensions(cfg.env.observation_len(), &cfg.ppo.hidden_sizes, cfg.env.r_max)?;
            Ok(ck.agent)
        })
        .collect()
}

/// Train every seed, then evaluate the final policies.
pub fn run_train(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let started = Instant::now();
    start_run(cfg, opts)?;
    let resumes: Vec<Option<Checkpoint>> = match &opts.checkpoint {
        Some(path) => cfg
            .seeds
            .iter()
            .map(|&s| Checkpoint::load(&resolve_checkpoint(path, s)).map(Some))
            .collect::<Result<_>>()?,
        None => vec![None; cfg.seeds.len()],
    };
    let outcomes = collect(par::map_indexed(cfg.seeds.len(), cfg.execution, |i| {
        let seed = cfg.seeds[i];
        let dir = seed_dir(&cfg.output_dir, seed);
        let out = train_seed(cfg, seed, resumes[i].clone(), Some(&dir))?;
        let episodes = evaluate_seed(
            cfg,
            seed,
            Controller::Policy {
                agent: &out.agent,
                deterministic: cfg.eval_deterministic,
            },
            Some(&dir),
        )?;
        Ok((out.curve, seed_result(seed, &episodes)))
    }))?;
    let (curves, per_seed): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let summary = summarize(cfg, "train", cfg.ppo.episodes_total, &curves, per_seed, started);
    write_summary(&cfg.output_dir, &summary)?;
    Ok(summary)
}

/// Evaluate stored policies on every seed's evaluation worlds.
pub fn run_eval(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let started = Instant::now();
    let checkpoint = opts
        .checkpoint
        .as_deref()
        .ok_or_else(|| Error::config("checkpoint", "eval needs a checkpoint"))?;
    cfg.validate()?;
    let agents = load_agents(cfg, checkpoint)?;
    start_run(cfg, opts)?;
    let per_seed = collect(par::map_indexed(cfg.seeds.len(), cfg.execution, |i| {
        let seed = cfg.seeds[i];
        let controller = Controller::Policy {
            agent: &agents[i],
            deterministic: cfg.eval_deterministic,
        };
        let episodes = evaluate_seed(cfg, seed, controller, Some(&seed_dir(&cfg.output_dir, seed)))?;
        Ok(seed_result(seed, &episodes))
    }))?;
    let summary = summarize(cfg, "eval", 0, &[], per_seed, started);
    write_summary(&cfg.output_dir, &summary)?;
    Ok(summary)
}

/// The configuration used by the static baseline: UAV at the arena center.
pub fn static_config(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.env.uav_start = UavStart::Center;
    c
}

/// Same evaluation worlds as [`run_eval`], with the UAV pinned at the center.
pub fn run_static_baseline(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let started = Instant::now();
    let cfg = static_config(cfg);
    start_run(&cfg, opts)?;
    let per_seed = collect(par::map_indexed(cfg.seeds.len(), cfg.execution, |i| {
        let seed = cfg.seeds[i];
        let episodes = evaluate_seed(&cfg, seed, Controller::Hover, Some(&seed_dir(&cfg.output_dir, seed)))?;
        Ok(seed_result(seed, &episodes))
    }))?;
    let summary = summarize(&cfg, "baseline", 0, &[], per_seed, started);
    write_summary(&cfg.output_dir, &summary)?;
    Ok(summary)
}

/// Throughput per AoA noise level. Uses stored policies when `opts.checkpoint`
/// is set; otherwise trains a fresh policy per seed and noise level.
pub fn run_noise_sweep(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    if cfg.aoa_noise_sweep.is_empty() {
        return Err(Error::config("aoa_noise_sweep", "needs at least one noise level"));
    }
    let agents = match &opts.checkpoint {
        Some(path) => Some(load_agents(cfg, path)?),
        None => None,
    };
    let started = Instant::now();
    start_run(cfg, opts)?;

    let levels = &cfg.aoa_noise_sweep;
    let n_seeds = cfg.seeds.len();
    let cells = collect(par::map_indexed(levels.len() * n_seeds, cfg.execution, |k| {
        let (level, i) = (k / n_seeds, k % n_seeds);
        let seed = cfg.seeds[i];
        let mut c = cfg.clone();
        c.env.radio.aoa_noise_std = levels[level];
        let trained;
        let agent = match &agents {
            Some(a) => &a[i],
            None => {
                trained = train_seed(&c, seed, None, None)?.agent;
                &trained
            }
        };
        let controller = Controller::Policy {
            agent,
            deterministic: c.eval_deterministic,
        };
        Ok(seed_result(seed, &evaluate_seed(&c, seed, controller, None)?))
    }))?;

    let points: Vec<SweepPoint> = levels
        .iter()
        .enumerate()
        .map(|(l, &std)| {
            let per_seed: Vec<f64> = cells[l * n_seeds..(l + 1) * n_seeds]
                .iter()
                .map(|c| c.eval_mean_throughput_bps)
                .collect();
            let (mean, sd) = mean_std(&per_seed);
            SweepPoint {
                noise_std_deg: std,
                mean_throughput_bps: mean,
                std_throughput_bps: sd,
                per_seed_bps: per_seed,
            }
        })
        .collect();

    let mut header: Vec<String> = ["noise_std_deg", "mean_throughput_bps", "std_throughput_bps"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(cfg.seeds.iter().map(|s| format!("seed_{s}_bps")));
    let mut w = CsvWriter::create(&cfg.output_dir.join("sweep.csv"), SWEEP_SCHEMA, &header)?;
    for p in &points {
        let mut row = vec![p.noise_std_deg, p.mean_throughput_bps, p.std_throughput_bps];
        row.extend(&p.per_seed_bps);
        w.write_row(&row)?;
    }

    // The summary reports the first noise level.
    let summary = summarize(cfg, "sweep", 0, &[], cells[..n_seeds].to_vec(), started);
    write_summary(&cfg.output_dir, &summary)?;
    Ok(points)
}
