//! Per-step metrics rows, the per-run summary and their CSV files.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const METRICS_HEADER: &str = "algo,game,step,elo,alpha_rank,time_step_s,cum_time_s,converged";
pub const SUMMARY_HEADER: &str = "algo,game,time_step_s,steps_conv,time_conv_s";

/// One training step. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub algo: String,
    pub game: String,
    pub step: u64,
    pub elo: f64,
    pub alpha_rank: f64,
    pub time_step_s: f64,
    pub cum_time_s: f64,
    pub converged: bool,
}

/// One run. Convergence fields are empty when the run never converged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algo: String,
    pub game: String,
    pub time_step_s: f64,
    pub steps_conv: Option<u64>,
    pub time_conv_s: Option<f64>,
}

/// Seconds rounded to the millisecond.
pub fn millis(seconds: f64) -> f64 {
    (seconds * 1000.0).round() / 1000.0
}

/// Mean step time, first converged step and the cumulative time up to it.
pub fn timing_report(rows: &[MetricsRow]) -> Result<SummaryRow, EvalError> {
    let first = rows.first().ok_or(EvalError::NoIterations)?;
    let mean = rows.iter().map(|r| r.time_step_s).sum::<f64>() / rows.len() as f64;
    let conv = rows.iter().find(|r| r.converged);
    Ok(SummaryRow {
        algo: first.algo.clone(),
        game: first.game.clone(),
        time_step_s: millis(mean),
        steps_conv: conv.map(|r| r.step),
        time_conv_s: conv.map(|r| r.cum_time_s),
    })
}

/// Appends metrics rows to a CSV file, flushing after each row so a crash
/// loses at most the step in progress.
pub struct MetricsWriter {
    file: File,
}

impl MetricsWriter {
    /// Opens `path` for appending, writing the header if the file is new or
    /// empty.
    pub fn open(path: &Path) -> Result<Self, EvalError> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if file.metadata()?.len() == 0 {
            writeln!(file, "{METRICS_HEADER}")?;
        }
        Ok(Self { file })
    }

    pub fn append(&mut self, row: &MetricsRow) -> Result<(), EvalError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.serialize(row)?;
        let bytes = w.into_inner().map_err(|e| EvalError::Io(e.into_error()))?;
        self.file.write_all(&bytes)?;
        self.file.flush()?;
        Ok(())
    }
}

pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> Result<(), EvalError> {
    write_all(path, rows)
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<(), EvalError> {
    write_all(path, rows)
}

fn write_all<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
