//! Minimal dense network baseline with analytic gradients, flattened into
//! the same gradient-vector form as the quantum models so the inversion
//! engine applies unchanged.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::attack::{run_attack, AttackConfig, AttackOutcome};
use crate::error::{Error, Result};
use crate::model::{
    fingerprint_bytes, GradientModel, GradientVector, ModelFingerprint, SupervisedModel, Task,
};

/// Fully connected J → hidden → 1 network with tanh activations. For
/// classification the tanh head is mapped affinely onto a probability, the
/// same convention as the quantum readout.
#[derive(Debug, Clone)]
pub struct MlpModel {
    input_dim: usize,
    hidden: usize,
    /// Flat parameters: W1 row-major (hidden × input), b1, w2, b2.
    params: Vec<f64>,
    task: Task,
    fingerprint: ModelFingerprint,
}

impl MlpModel {
    pub fn new(input_dim: usize, hidden: usize, task: Task) -> Result<Self> {
        if input_dim == 0 || hidden == 0 {
            return Err(Error::Config("mlp needs input_dim >= 1 and hidden >= 1".into()));
        }
        let count = hidden * input_dim + hidden + hidden + 1;
        let mut model = MlpModel {
            input_dim,
            hidden,
            params: vec![0.0; count],
            task,
            fingerprint: ModelFingerprint(0),
        };
        model.refresh_fingerprint();
        Ok(model)
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    fn refresh_fingerprint(&mut self) {
        self.fingerprint = fingerprint_bytes(
            "mlp",
            &[
                self.input_dim,
                self.hidden,
                match self.task {
                    Task::Regression => 0,
                    Task::BinaryClassification => 1,
                },
            ],
            &self.params,
        );
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], f64) {
        let w1_len = self.hidden * self.input_dim;
        let (w1, rest) = self.params.split_at(w1_len);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.hidden);
        (w1, b1, w2, b2[0])
    }

    /// Forward pass returning (hidden activations, raw tanh output).
    fn forward_parts(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        if x.len() != self.input_dim {
            return Err(Error::Config(format!(
                "input dimension {} does not match {}",
                x.len(),
                self.input_dim
            )));
        }
        let (w1, b1, w2, b2) = self.split();
        let mut hidden_act = Vec::with_capacity(self.hidden);
        for h in 0..self.hidden {
            let z: f64 = w1[h * self.input_dim..(h + 1) * self.input_dim]
                .iter()
                .zip(x)
                .map(|(w, v)| w * v)
                .sum::<f64>()
                + b1[h];
            hidden_act.push(z.tanh());
        }
        let z2: f64 = w2.iter().zip(&hidden_act).map(|(w, a)| w * a).sum::<f64>() + b2;
        Ok((hidden_act, z2.tanh()))
    }
}

impl GradientModel for MlpModel {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn weight_count(&self) -> usize {
        self.params.len()
    }

    fn fingerprint(&self) -> ModelFingerprint {
        self.fingerprint
    }

    fn task(&self) -> Task {
        self.task
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        let (_, raw) = self.forward_parts(x)?;
        Ok(match self.task {
            Task::Regression => raw,
            Task::BinaryClassification => 0.5 * (1.0 + raw),
        })
    }

    /// Analytic backpropagation of the prediction itself (upstream
    /// derivative 1); the loss gradient scales this by 2(ŷ − y).
    fn prediction_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (hidden_act, raw) = self.forward_parts(x)?;
        let (_, _, w2, _) = self.split();
        let head_scale = match self.task {
            Task::Regression => 1.0,
            Task::BinaryClassification => 0.5,
        };
        // δ2 = d pred / d z2
        let delta2 = head_scale * (1.0 - raw * raw);
        let mut grad = vec![0.0; self.params.len()];
        let w1_len = self.hidden * self.input_dim;
        for h in 0..self.hidden {
            let delta1 = delta2 * w2[h] * (1.0 - hidden_act[h] * hidden_act[h]);
            for (j, xv) in x.iter().enumerate() {
                grad[h * self.input_dim + j] = delta1 * xv;
            }
            grad[w1_len + h] = delta1; // b1
            grad[w1_len + self.hidden + h] = delta2 * hidden_act[h]; // w2
        }
        grad[self.params.len() - 1] = delta2; // b2
        Ok(grad)
    }
}

impl SupervisedModel for MlpModel {
    fn weights(&self) -> &[f64] {
        &self.params
    }

    fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.params.len() {
            return Err(Error::Config(format!(
                "expected {} parameters, got {}",
                self.params.len(),
                weights.len()
            )));
        }
        self.params = weights;
        self.refresh_fingerprint();
        Ok(())
    }

    /// Uniform in ±1/√fan_in per layer.
    fn init_weights(&mut self, rng: &mut ChaCha8Rng) {
        let w1_len = self.hidden * self.input_dim;
        let bound1 = 1.0 / (self.input_dim as f64).sqrt();
        let bound2 = 1.0 / (self.hidden as f64).sqrt();
        let params: Vec<f64> = (0..self.params.len())
            .map(|i| {
                let bound = if i < w1_len + self.hidden { bound1 } else { bound2 };
                rng.random_range(-bound..bound)
            })
            .collect();
        self.params = params;
        self.refresh_fingerprint();
    }

    fn family_name(&self) -> String {
        format!("mlp-{}", self.hidden)
    }
}

/// Attack an MLP's shared gradient. The gradient-matching landscape of the
/// dense network is smooth, so no moving-average filtering is needed:
/// the window starts (and stays) at 1 unless the caller overrides it.
pub fn attack_nn(
    model: &MlpModel,
    shared: &GradientVector,
    cfg: &AttackConfig,
    ground_truth: Option<&[Vec<f64>]>,
    batch_guess: usize,
) -> Result<AttackOutcome> {
    run_attack(model, shared, cfg, ground_truth, batch_guess)
}

/// Default attack settings for the dense baseline.
pub fn nn_attack_config(seed: u64) -> AttackConfig {
    AttackConfig {
        initial_window: 1,
        step: 0.01,
        learning_rate: 2.0,
        max_iterations: 200,
        ..AttackConfig { seed, ..Default::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GradientKind;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn zero_parameters_hand_case() {
        // All-zero weights: ŷ = tanh(0) = 0 and the output-bias loss
        // derivative is 2(0 − y)·1 = −2y.
        let model = MlpModel::new(3, 4, Task::Regression).unwrap();
        assert_eq!(model.predict(&[0.5, -0.2, 1.0]).unwrap(), 0.0);
        let y = 0.8;
        let g = model.loss_gradient(&[0.5, -0.2, 1.0], y).unwrap();
        let b2_index = model.weight_count() - 1;
        assert_abs_diff_eq!(g.values()[b2_index], -2.0 * y, epsilon = 1e-15);
    }

    #[test]
    fn zero_residual_gives_zero_gradient() {
        let mut model = MlpModel::new(2, 3, Task::Regression).unwrap();
        model.init_weights(&mut crate::rng::stream(5, "mlp-test"));
        let x = vec![0.3, -0.9];
        let y = model.predict(&x).unwrap();
        let g = model.loss_gradient(&x, y).unwrap();
        assert!(g.values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = crate::rng::stream(6, "mlp-test");
        for trial in 0..20 {
            let task = if trial % 2 == 0 { Task::Regression } else { Task::BinaryClassification };
            let mut model = MlpModel::new(3, 5, task).unwrap();
            let mut seed_rng = crate::rng::substream(6, "mlp-init", trial);
            model.init_weights(&mut seed_rng);
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();

            let analytic = model.prediction_gradient(&x).unwrap();
            let h = 1e-6;
            for m in 0..model.weight_count() {
                let mut plus = model.clone();
                let mut minus = model.clone();
                let mut wp = plus.weights().to_vec();
                let mut wm = minus.weights().to_vec();
                wp[m] += h;
                wm[m] -= h;
                plus.set_weights(wp).unwrap();
                minus.set_weights(wm).unwrap();
                let fd = (plus.predict(&x).unwrap() - minus.predict(&x).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(analytic[m], fd, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn gradient_kinds_share_fingerprint_machinery() {
        let mut model = MlpModel::new(2, 4, Task::Regression).unwrap();
        model.init_weights(&mut crate::rng::stream(8, "mlp-test"));
        let rows = vec![(vec![0.1, 0.2], 0.4), (vec![-0.3, 0.9], -0.1)];
        let loss = model.shared_gradient(&rows, GradientKind::Loss).unwrap();
        let pred = model.shared_gradient(&rows, GradientKind::Prediction).unwrap();
        assert_eq!(loss.len(), model.weight_count());
        assert_eq!(loss.fingerprint(), pred.fingerprint());
        assert!(loss.check_comparable(&pred).is_err());
    }
}
