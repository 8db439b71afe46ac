//! Gaussian-noise privacy layer on shared gradients, and the
//! noise-vs-performance sweep.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::attack::{run_attack, AttackConfig};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::flsim::{self, FlRound};
use crate::model::{GradientVector, SupervisedModel};
use crate::rng;
use crate::trainer::{self, TrainConfig};

/// Elementwise Gaussian noise of standard deviation σ.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(sigma: f64, seed: u64) -> Self {
        NoiseConfig { sigma, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma < 0.0 || !self.sigma.is_finite() {
            return Err(Error::Config(format!("noise sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Add N(0, σ²) draws in place; σ = 0 leaves values untouched and
    /// consumes no randomness.
    pub fn perturb<R: Rng>(&self, values: &mut [f64], rng: &mut R) {
        if self.sigma == 0.0 {
            return;
        }
        let normal = Normal::new(0.0, self.sigma).expect("validated sigma");
        for v in values {
            *v += normal.sample(rng);
        }
    }
}

/// Noise the shared gradient once, as done at share time.
pub fn add_noise(gradient: &GradientVector, cfg: &NoiseConfig) -> Result<GradientVector> {
    cfg.validate()?;
    let mut noised = gradient.clone();
    let mut rng = rng::stream(cfg.seed, "share-noise");
    cfg.perturb(noised.values_mut(), &mut rng);
    Ok(noised)
}

/// One row of the privacy sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepPoint {
    pub sigma: f64,
    pub metric: String,
    pub train_score: f64,
    pub test_score: f64,
    pub attack_mse: f64,
}

/// For each σ: train with per-step noisy gradient updates, then attack a
/// noisy shared gradient of the first dataset row, recording scores and
/// inversion error.
pub fn sweep<M: SupervisedModel>(
    model: &M,
    data: &Dataset,
    sigmas: &[f64],
    train_cfg: &TrainConfig,
    attack_cfg: &AttackConfig,
) -> Result<Vec<SweepPoint>> {
    if sigmas.is_empty() {
        return Err(Error::Config("sigma list must be non-empty".into()));
    }
    let mut points = Vec::with_capacity(sigmas.len());
    for (i, &sigma) in sigmas.iter().enumerate() {
        let noise = NoiseConfig::new(sigma, rng_seed_for(train_cfg.seed, i));
        noise.validate()?;

        let noisy_train = TrainConfig { noise: Some(noise.clone()), ..train_cfg.clone() };
        let (_, report) = trainer::train(model, data, &noisy_train)?;

        let secret: Vec<Vec<f64>> = vec![data.rows[0].x.clone()];
        let labels: Vec<f64> = vec![data.rows[0].y];
        let round = FlRound::single(model.clone(), secret_rows(&secret, &labels), attack_cfg.kind);
        let output = flsim::run_round(&round, &noise)?;
        let mut cfg = attack_cfg.clone();
        cfg.known_labels = match cfg.kind {
            crate::model::GradientKind::Loss => Some(labels),
            crate::model::GradientKind::Prediction => None,
        };
        let outcome = run_attack(model, &output.intercepted, &cfg, Some(&secret), 1)?;
        let attack_mse = outcome.evaluation.expect("ground truth supplied").mse;

        points.push(SweepPoint {
            sigma,
            metric: report.metric.name().to_string(),
            train_score: report.train_score,
            test_score: report.test_score,
            attack_mse,
        });
    }
    Ok(points)
}

fn secret_rows(xs: &[Vec<f64>], ys: &[f64]) -> Vec<(Vec<f64>, f64)> {
    xs.iter().cloned().zip(ys.iter().copied()).collect()
}

fn rng_seed_for(seed: u64, index: usize) -> u64 {
    // Distinct noise stream per sweep point.
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64)
}
