//! Evaluation metrics: R² for regression, balanced accuracy for
//! classification.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MetricKind {
    R2,
    BalancedAccuracy,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::R2 => "r2",
            MetricKind::BalancedAccuracy => "balanced_accuracy",
        }
    }
}

/// Coefficient of determination, 1 − SS_res/SS_tot.
pub fn r2(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() || targets.len() < 2 {
        return Err(Error::Input(format!(
            "r2 needs two equal-length series of >= 2 points, got {}/{}",
            predictions.len(),
            targets.len()
        )));
    }
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|t| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric("r2 with constant targets".into()));
    }
    let ss_res: f64 =
        predictions.iter().zip(targets).map(|(p, t)| (p - t).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Threshold used throughout: probability ≥ 0.5 maps to label 1.
pub fn prob_to_label(p: f64) -> bool {
    p >= 0.5
}

/// Mean of per-class recalls. Truth must contain both classes.
pub fn balanced_accuracy(predicted: &[bool], truth: &[bool]) -> Result<f64> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::Input(format!(
            "balanced accuracy needs equal-length non-empty label series, got {}/{}",
            predicted.len(),
            truth.len()
        )));
    }
    let mut hits = [0usize; 2];
    let mut totals = [0usize; 2];
    for (&p, &t) in predicted.iter().zip(truth) {
        let class = t as usize;
        totals[class] += 1;
        if p == t {
            hits[class] += 1;
        }
    }
    if totals[0] == 0 || totals[1] == 0 {
        return Err(Error::UndefinedMetric("balanced accuracy with single-class truth".into()));
    }
    let recall0 = hits[0] as f64 / totals[0] as f64;
    let recall1 = hits[1] as f64 / totals[1] as f64;
    Ok(0.5 * (recall0 + recall1))
}

/// Standard error of the mean (n − 1 denominator).
pub fn standard_error(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}
