//! The `compare` command: the three algorithms on one game with the same
//! seed and equal per-move simulation totals.
//!
//! Each algorithm writes a full `train` output directory under
//! `OUT/<algo>/`; `OUT/summary.csv` holds one timing row per algorithm.

use std::fs;
use std::path::Path;

use dualmcts::eval::{timing_report, write_summary_csv, SummaryRow};
use dualmcts::training::{Algorithm, BudgetMode};

use crate::config::{Overrides, RunConfig};
use crate::train::{train_run, RunManifest};
use crate::{CliError, CompareArgs};

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub runs: Vec<(Algorithm, RunManifest)>,
    pub summary: Vec<SummaryRow>,
}

pub fn cmd_compare(args: &CompareArgs) -> Result<CompareOutcome, CliError> {
    let overrides = Overrides {
        game: Some(args.game.name().to_string()),
        seed: args.seed,
        max_steps: args.max_steps,
        b_sub: args.b_sub,
        b_full: args.b_full,
        ..Overrides::default()
    };
    let base = RunConfig::resolve(args.config.as_deref(), &overrides)?;
    let algos: Vec<Algorithm> =
        if args.algos.is_empty() { Algorithm::ALL.to_vec() } else { args.algos.iter().map(|&a| a.into()).collect() };
    compare_run(&base, &algos, &args.out)
}

/// Runs each algorithm with `base` and checks budget parity from the
/// manifests before writing the summary.
pub fn compare_run(base: &RunConfig, algos: &[Algorithm], out: &Path) -> Result<CompareOutcome, CliError> {
    fs::create_dir_all(out).map_err(CliError::io(format!("creating {}", out.display())))?;
    let mut runs = Vec::with_capacity(algos.len());
    for &algo in algos {
        let mut cfg = base.clone();
        cfg.trainer.algorithm = algo;
        let manifest = train_run(&cfg, &out.join(algo.name()))?;
        runs.push((algo, manifest));
    }
    if base.trainer.budget.mode == BudgetMode::Fixed {
        check_parity(&runs, base.trainer.budget.fixed().total())?;
    }
    let summary = runs.iter().map(|(_, m)| timing_report(&m.rows)).collect::<Result<Vec<_>, _>>()?;
    write_summary_csv(&out.join("summary.csv"), &summary)?;
    Ok(CompareOutcome { runs, summary })
}

/// Every searched move of every algorithm used exactly `total` simulations.
fn check_parity(runs: &[(Algorithm, RunManifest)], total: u32) -> Result<(), CliError> {
    for (algo, m) in runs {
        for s in &m.steps {
            if s.sims_per_move != f64::from(total) {
                return Err(CliError::Parity(format!(
                    "{algo} step {} averaged {} simulations per move, expected {total}",
                    s.step, s.sims_per_move
                )));
            }
        }
    }
    Ok(())
}
