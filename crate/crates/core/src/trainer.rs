//! SGD training with k-fold cross-validation.
//!
//! Folds train independently (each with its own RNG streams) and may run in
//! parallel; results are merged by fold index so runs are bit-reproducible.

use rayon::prelude::*;

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{self, MetricKind};
use crate::model::{GradientKind, SupervisedModel, Task};
use crate::privacy::NoiseConfig;
use crate::rng;
use rand::seq::SliceRandom;

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    /// Learning rate η.
    pub learning_rate: f64,
    /// Epochs I.
    pub epochs: usize,
    /// Batch size B; updates apply the mean gradient of each batch.
    pub batch_size: usize,
    pub seed: u64,
    pub fold_count: usize,
    /// Train fraction of each fold split; 0.8 matches 5 folds.
    pub split_ratio: f64,
    /// Per-step Gaussian noise on the update gradient, when simulating
    /// training from noised shares.
    pub noise: Option<NoiseConfig>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 50,
            batch_size: 1,
            seed: 0,
            fold_count: 5,
            split_ratio: 0.8,
            noise: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning rate must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epoch count must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be >= 1".into()));
        }
        if self.fold_count < 2 {
            return Err(Error::Config("cross-validation needs >= 2 folds".into()));
        }
        if !(0.0..1.0).contains(&self.split_ratio) || self.split_ratio == 0.0 {
            return Err(Error::Config("split ratio must lie in (0, 1)".into()));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }
}

/// Cross-validated scores for one trained configuration.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MetricsReport {
    pub metric: MetricKind,
    pub train_score: f64,
    pub test_score: f64,
    pub fold_train: Vec<f64>,
    pub fold_test: Vec<f64>,
    pub train_se: f64,
    pub test_se: f64,
}

/// Train with k-fold cross-validation; returns the model refit on the full
/// dataset alongside the fold metrics.
pub fn train<M: SupervisedModel>(
    model: &M,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(M, MetricsReport)> {
    cfg.validate()?;
    if data.task != model.task() {
        return Err(Error::Config(format!(
            "dataset task {:?} does not match model task {:?}",
            data.task,
            model.task()
        )));
    }
    if data.rows.len() < cfg.fold_count {
        return Err(Error::Config(format!(
            "{} rows cannot be split into {} folds",
            data.rows.len(),
            cfg.fold_count
        )));
    }

    let folds = fold_indices(data.rows.len(), cfg.fold_count, cfg.seed);
    let rows = data.batch_rows();

    let fold_results: Vec<Result<(f64, f64)>> = folds
        .par_iter()
        .enumerate()
        .map(|(fold, test_idx)| {
            let train_rows: Vec<(Vec<f64>, f64)> = (0..rows.len())
                .filter(|i| !test_idx.contains(i))
                .map(|i| rows[i].clone())
                .collect();
            let test_rows: Vec<(Vec<f64>, f64)> =
                test_idx.iter().map(|&i| rows[i].clone()).collect();
            let mut candidate = model.clone();
            candidate.init_weights(&mut rng::substream(cfg.seed, "train-init", fold as u64));
            sgd_fit(&mut candidate, &train_rows, cfg, fold as u64)?;
            let train_score = score(&candidate, &train_rows)?;
            let test_score = score(&candidate, &test_rows)?;
            Ok((train_score, test_score))
        })
        .collect();

    let mut fold_train = Vec::with_capacity(cfg.fold_count);
    let mut fold_test = Vec::with_capacity(cfg.fold_count);
    for result in fold_results {
        let (tr, te) = result?;
        fold_train.push(tr);
        fold_test.push(te);
    }

    // Final weights come from a fit on the full dataset with its own stream.
    let mut final_model = model.clone();
    final_model.init_weights(&mut rng::substream(cfg.seed, "train-init", cfg.fold_count as u64));
    sgd_fit(&mut final_model, &rows, cfg, cfg.fold_count as u64)?;

    let report = MetricsReport {
        metric: match data.task {
            Task::Regression => MetricKind::R2,
            Task::BinaryClassification => MetricKind::BalancedAccuracy,
        },
        train_score: mean(&fold_train),
        test_score: mean(&fold_test),
        train_se: metrics::standard_error(&fold_train),
        test_se: metrics::standard_error(&fold_test),
        fold_train,
        fold_test,
    };
    Ok((final_model, report))
}

/// Plain SGD: θ ← θ − η·g per batch for the configured epochs.
pub fn sgd_fit<M: SupervisedModel>(
    model: &mut M,
    rows: &[(Vec<f64>, f64)],
    cfg: &TrainConfig,
    stream_index: u64,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Input("cannot train on an empty split".into()));
    }
    let mut order_rng = rng::substream(cfg.seed, "train-order", stream_index);
    let mut noise_rng = rng::substream(cfg.seed, "train-noise", stream_index);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut order_rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(Vec<f64>, f64)> = chunk.iter().map(|&i| rows[i].clone()).collect();
            let mut gradient = model.shared_gradient(&batch, GradientKind::Loss)?;
            if let Some(noise) = &cfg.noise {
                noise.perturb(gradient.values_mut(), &mut noise_rng);
            }
            if gradient.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::Runtime(format!("non-finite gradient at epoch {epoch}")));
            }
            let weights: Vec<f64> = model
                .weights()
                .iter()
                .zip(gradient.values())
                .map(|(w, g)| w - cfg.learning_rate * g)
                .collect();
            if weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::Runtime(format!("training diverged at epoch {epoch}")));
            }
            model.set_weights(weights)?;
        }
    }
    Ok(())
}

/// Task-appropriate score of a model on rows.
pub fn score<M: SupervisedModel>(model: &M, rows: &[(Vec<f64>, f64)]) -> Result<f64> {
    let predictions: Vec<f64> =
        rows.iter().map(|(x, _)| model.predict(x)).collect::<Result<_>>()?;
    let targets: Vec<f64> = rows.iter().map(|(_, y)| *y).collect();
    match model.task() {
        Task::Regression => metrics::r2(&predictions, &targets),
        Task::BinaryClassification => {
            let predicted: Vec<bool> = predictions.iter().map(|&p| metrics::prob_to_label(p)).collect();
            let truth: Vec<bool> = targets.iter().map(|&y| y == 1.0).collect();
            metrics::balanced_accuracy(&predicted, &truth)
        }
    }
}

/// Disjoint fold assignment covering every row exactly once.
pub fn fold_indices(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, "train-folds"));
    let mut out = vec![Vec::new(); folds];
    for (pos, idx) in order.into_iter().enumerate() {
        out[pos % folds].push(idx);
    }
    for fold in &mut out {
        fold.sort_unstable();
    }
    out
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
