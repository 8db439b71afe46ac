//! Result artifacts: trace CSVs, summary JSON, metric and sweep tables.
//! Every artifact embeds the resolved config hash, the root seed, and the
//! crate version so runs can be reproduced byte for byte.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::attack::AttackOutcome;
use crate::error::{Error, Result};
use crate::metrics::standard_error;
use crate::privacy::SweepPoint;
use crate::trainer::MetricsReport;

/// Identity block embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunStamp {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl RunStamp {
    pub fn new<T: Serialize>(config: &T, seed: u64) -> Result<Self> {
        Ok(RunStamp {
            config_hash: config_hash(config)?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

/// Hex digest of the canonical JSON form of a config.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config)?;
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let digest = hasher.finalize();
    Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Per-iteration attack traces for a set of trials.
/// Columns: trial, k, loss_gg, mse_x, window_N, wall_ms. The mse column is
/// empty when no ground truth was supplied.
pub fn write_trace_csv<P: AsRef<Path>>(path: P, outcomes: &[AttackOutcome]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    writer
        .write_record(["trial", "k", "loss_gg", "mse_x", "window_N", "wall_ms"])
        .map_err(csv_err)?;
    for (trial, outcome) in outcomes.iter().enumerate() {
        for row in &outcome.trace {
            writer
                .write_record([
                    trial.to_string(),
                    row.iteration.to_string(),
                    format!("{:e}", row.loss),
                    row.input_mse.map(|m| format!("{m:e}")).unwrap_or_default(),
                    row.window.to_string(),
                    row.wall_ms.to_string(),
                ])
                .map_err(csv_err)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Aggregate statistics over attack restarts.
#[derive(Debug, Clone, Serialize)]
pub struct AttackSummary {
    pub trials: usize,
    /// Fraction of trials whose final MSE met the success threshold.
    pub success_rate: f64,
    pub mean_mse: f64,
    pub se_mse: f64,
    /// Mean iteration count at which successful trials first met the
    /// threshold; absent when no trial succeeded.
    pub iterations_to_tol: Option<f64>,
    #[serde(flatten)]
    pub stamp: RunStamp,
}

pub fn summarize_attacks(outcomes: &[AttackOutcome], tol: f64, stamp: RunStamp) -> AttackSummary {
    let mses: Vec<f64> =
        outcomes.iter().filter_map(|o| o.evaluation.map(|e| e.mse)).collect();
    let successes: Vec<&AttackOutcome> = outcomes
        .iter()
        .filter(|o| o.evaluation.is_some_and(|e| e.mse <= tol))
        .collect();
    let iterations: Vec<f64> = successes
        .iter()
        .filter_map(|o| o.iterations_to(tol).map(|k| k as f64))
        .collect();
    AttackSummary {
        trials: outcomes.len(),
        success_rate: if outcomes.is_empty() {
            0.0
        } else {
            successes.len() as f64 / outcomes.len() as f64
        },
        mean_mse: if mses.is_empty() { f64::NAN } else { mses.iter().sum::<f64>() / mses.len() as f64 },
        se_mse: standard_error(&mses),
        iterations_to_tol: if iterations.is_empty() {
            None
        } else {
            Some(iterations.iter().sum::<f64>() / iterations.len() as f64)
        },
        stamp,
    }
}

/// Metrics artifact for one training run.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsArtifact {
    pub dataset: String,
    pub family: String,
    pub qubits: usize,
    #[serde(flatten)]
    pub report: MetricsReport,
    #[serde(flatten)]
    pub stamp: RunStamp,
}

pub fn write_json<P: AsRef<Path>, T: Serialize>(path: P, value: &T) -> Result<()> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    std::fs::write(path.as_ref(), body)?;
    Ok(())
}

/// One-line CSV form of a metrics report:
/// dataset, family, qubits, metric, train, test, se.
pub fn write_metrics_csv<P: AsRef<Path>>(path: P, artifact: &MetricsArtifact) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    writer
        .write_record(["dataset", "family", "qubits", "metric", "train", "test", "se"])
        .map_err(csv_err)?;
    writer
        .write_record([
            artifact.dataset.clone(),
            artifact.family.clone(),
            artifact.qubits.to_string(),
            artifact.report.metric.name().to_string(),
            format!("{:e}", artifact.report.train_score),
            format!("{:e}", artifact.report.test_score),
            format!("{:e}", artifact.report.test_se),
        ])
        .map_err(csv_err)?;
    writer.flush()?;
    Ok(())
}

/// Noise sweep table: sigma, metric, train, test, attack_mse.
pub fn write_sweep_csv<P: AsRef<Path>>(path: P, points: &[SweepPoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    writer
        .write_record(["sigma", "metric", "train", "test", "attack_mse"])
        .map_err(csv_err)?;
    for p in points {
        writer
            .write_record([
                format!("{}", p.sigma),
                p.metric.clone(),
                format!("{:e}", p.train_score),
                format!("{:e}", p.test_score),
                format!("{:e}", p.attack_mse),
            ])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

/// One row of the depth study: ansatz parameter count and the mean
/// iterations needed to reach the reference reconstruction error.
#[derive(Debug, Clone, Serialize)]
pub struct DepthPoint {
    pub param_count: usize,
    pub iterations: f64,
    pub series: String,
}

pub fn write_depth_csv<P: AsRef<Path>>(path: P, points: &[DepthPoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    writer.write_record(["param_count", "iterations", "series"]).map_err(csv_err)?;
    for p in points {
        writer
            .write_record([p.param_count.to_string(), format!("{}", p.iterations), p.series.clone()])
            .map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}
