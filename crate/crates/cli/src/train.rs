//! The `train` command.
//!
//! Output directory layout:
//!
//! ```text
//! config.toml               resolved configuration
//! manifest.json             rewritten after every step
//! metrics.csv               one row per step, appended and flushed
//! checkpoints/step_N.json   (MPV: step_N_small.json and step_N_large.json)
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use dualmcts::eval::{millis, ConvergenceTracker, MetricsRow, MetricsWriter};
use dualmcts::net::save_checkpoint;
use dualmcts::training::{Model, Trainer};
use serde::{Deserialize, Serialize};

use crate::config::{Overrides, RunConfig};
use crate::{CliError, TrainArgs};

/// Everything needed to replay a run, plus what it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub started_unix_s: f64,
    pub finished_unix_s: Option<f64>,
    pub rows: Vec<MetricsRow>,
    pub steps: Vec<StepRecord>,
    /// First converged step, if any.
    pub converged_at: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    /// Paths relative to the output directory.
    pub checkpoints: Vec<String>,
    /// Measured mean simulations per searched self-play move.
    pub sims_per_move: f64,
    pub moves: u64,
    pub mean_loss: Option<f64>,
    /// Selection intensity the α-rank score was computed at.
    pub alpha: f64,
    pub self_play_s: f64,
    pub train_s: f64,
    pub eval_s: f64,
}

pub fn cmd_train(args: &TrainArgs) -> Result<RunManifest, CliError> {
    let overrides = Overrides {
        algorithm: args.algo.map(Into::into),
        game: args.game.map(|g| g.name().to_string()),
        seed: args.seed,
        max_steps: args.max_steps,
        ..Overrides::default()
    };
    let cfg = RunConfig::resolve(args.config.as_deref(), &overrides)?;
    train_run(&cfg, &args.out)
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn write_manifest(out: &Path, m: &RunManifest) -> Result<(), CliError> {
    let tmp = out.join("manifest.json.tmp");
    let json = serde_json::to_string_pretty(m).expect("manifest serialises");
    fs::write(&tmp, json).map_err(CliError::io("writing manifest"))?;
    fs::rename(&tmp, out.join("manifest.json")).map_err(CliError::io("writing manifest"))
}

fn save_model(model: &Model, cfg: &RunConfig, out: &Path, step: u64) -> Result<Vec<String>, CliError> {
    let nets = model.nets();
    let suffixes: &[&str] = if nets.len() == 1 { &[""] } else { &["_small", "_large"] };
    let mut paths = Vec::with_capacity(nets.len());
    for (net, suffix) in nets.into_iter().zip(suffixes) {
        let rel = format!("checkpoints/step_{step}{suffix}.json");
        save_checkpoint(&out.join(&rel), net, &cfg.trainer.game)?;
        paths.push(rel);
    }
    Ok(paths)
}

/// Trains until convergence (if configured to stop there) or until
/// `max_iterations` steps, writing all artifacts under `out`. A previous
/// metrics file in `out` is replaced.
pub fn train_run(cfg: &RunConfig, out: &Path) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    fs::create_dir_all(out.join("checkpoints")).map_err(CliError::io(format!("creating {}", out.display())))?;
    fs::write(out.join("config.toml"), cfg.to_toml()).map_err(CliError::io("writing config.toml"))?;
    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.trainer.seed,
        config: cfg.clone(),
        started_unix_s: unix_now(),
        finished_unix_s: None,
        rows: Vec::new(),
        steps: Vec::new(),
        converged_at: None,
    };
    write_manifest(out, &manifest)?;

    let metrics_path: PathBuf = out.join("metrics.csv");
    if metrics_path.exists() {
        fs::remove_file(&metrics_path).map_err(CliError::io("replacing metrics.csv"))?;
    }
    let mut metrics = MetricsWriter::open(&metrics_path)?;
    let mut trainer = Trainer::new(cfg.trainer.clone())?;
    let mut tracker = ConvergenceTracker::new(cfg.trainer.game, cfg.eval.clone(), cfg.trainer.seed)?;
    let budget = cfg.trainer.budget.fixed();
    let algo = cfg.trainer.algorithm.name();
    let game = cfg.trainer.game.name();
    let mut cum_time_s = 0.0;

    for _ in 0..cfg.trainer.max_iterations {
        let report = trainer.training_iteration()?;
        let step = report.iteration;
        let checkpoints = save_model(trainer.model(), cfg, out, step)?;

        let eval_started = Instant::now();
        let agent = cfg.eval.agent_for(trainer.model(), budget, trainer.settings());
        let ev = tracker.evaluate(&format!("step_{step}"), agent)?;
        let eval_s = eval_started.elapsed().as_secs_f64();

        cum_time_s += report.time_step_s;
        let row = MetricsRow {
            algo: algo.to_string(),
            game: game.to_string(),
            step,
            elo: ev.elo,
            alpha_rank: ev.alpha_rank,
            time_step_s: millis(report.time_step_s),
            cum_time_s: millis(cum_time_s),
            converged: ev.converged,
        };
        metrics.append(&row)?;
        println!(
            "{algo} {game} step {step}: elo {:.1}, alpha-rank {:.3}, {:.3} s/step, {:.1} sims/move",
            row.elo,
            row.alpha_rank,
            row.time_step_s,
            report.sims_per_move()
        );
        manifest.rows.push(row);
        manifest.steps.push(StepRecord {
            step,
            checkpoints,
            sims_per_move: report.sims_per_move(),
            moves: report.moves,
            mean_loss: report.mean_loss,
            alpha: ev.alpha,
            self_play_s: report.self_play_s,
            train_s: report.train_s,
            eval_s,
        });
        if ev.converged && manifest.converged_at.is_none() {
            manifest.converged_at = Some(step);
        }
        write_manifest(out, &manifest)?;
        if ev.converged && cfg.stop_at_convergence {
            break;
        }
    }
    manifest.finished_unix_s = Some(unix_now());
    write_manifest(out, &manifest)?;
    Ok(manifest)
}
