//! Variational quantum models: forward prediction, parameter-shift
//! gradients, and the gradient vectors shared in a training round.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::circuit::{AnsatzKind, CircuitSpec, FeatureMapKind};
use crate::error::{Error, Result};
use crate::statevector::{Gate, StateVector};

/// Prediction task of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Task {
    Regression,
    BinaryClassification,
}

/// Model families used in the experiments. Each bundles a feature map with
/// an ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModelFamily {
    Simple,
    SimpleEntangled,
    Complex,
    ZzEfficient,
}

impl ModelFamily {
    pub fn feature_map(self) -> FeatureMapKind {
        match self {
            ModelFamily::ZzEfficient => FeatureMapKind::ZzFeatureMap,
            _ => FeatureMapKind::AngleRx,
        }
    }

    pub fn ansatz(self) -> AnsatzKind {
        match self {
            ModelFamily::Simple => AnsatzKind::Simple,
            ModelFamily::SimpleEntangled => AnsatzKind::SimpleEntangled,
            ModelFamily::Complex => AnsatzKind::Complex,
            ModelFamily::ZzEfficient => AnsatzKind::EfficientSu2,
        }
    }

    pub fn default_reps(self) -> usize {
        match self {
            ModelFamily::Complex => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Simple => "simple",
            ModelFamily::SimpleEntangled => "simple-entangled",
            ModelFamily::Complex => "complex",
            ModelFamily::ZzEfficient => "zzefficient",
        }
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(ModelFamily::Simple),
            "simple-entangled" => Ok(ModelFamily::SimpleEntangled),
            "complex" => Ok(ModelFamily::Complex),
            "zzefficient" => Ok(ModelFamily::ZzEfficient),
            other => Err(Error::Config(format!("unknown model family '{other}'"))),
        }
    }
}

/// Stable identity of a model configuration including its weights.
///
/// Hashed over (family tag, qubits, reps, task, readout, θ) with θ
/// serialized as canonical little-endian 64-bit floats. Used to verify that
/// gradient vectors being compared came from the same model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ModelFingerprint(pub u64);

impl std::fmt::Display for ModelFingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

pub(crate) fn fingerprint_bytes(tag: &str, dims: &[usize], weights: &[f64]) -> ModelFingerprint {
    let mut hasher = Sha256::new();
    hasher.update(tag.as_bytes());
    hasher.update([0x00]);
    for d in dims {
        hasher.update((*d as u64).to_le_bytes());
    }
    hasher.update([0x01]);
    for w in weights {
        hasher.update(w.to_le_bytes());
    }
    let digest = hasher.finalize();
    ModelFingerprint(u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")))
}

/// Which quantity a client shares (and an attacker therefore matches).
///
/// Both sides of an experiment must build gradients through the same
/// variant; the vectors carry the kind so mismatches are caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GradientKind {
    /// Batch mean of ∂Loss/∂θ with Loss = (ŷ − y)²; requires targets.
    Loss,
    /// Batch mean of ∂ŷ/∂θ; label-free.
    Prediction,
}

/// Length-M vector of derivatives w.r.t. the model weights, plus the
/// metadata needed to check that two vectors are comparable.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GradientVector {
    values: Vec<f64>,
    batch_size: usize,
    kind: GradientKind,
    fingerprint: ModelFingerprint,
}

impl GradientVector {
    pub fn new(
        values: Vec<f64>,
        batch_size: usize,
        kind: GradientKind,
        fingerprint: ModelFingerprint,
    ) -> Self {
        GradientVector { values, batch_size, kind, fingerprint }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn kind(&self) -> GradientKind {
        self.kind
    }

    pub fn fingerprint(&self) -> ModelFingerprint {
        self.fingerprint
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Check that `other` may be compared elementwise against `self`.
    pub fn check_comparable(&self, other: &GradientVector) -> Result<()> {
        if self.values.len() != other.values.len()
            || self.fingerprint != other.fingerprint
            || self.kind != other.kind
        {
            return Err(Error::ModelMismatch(format!(
                "gradients disagree: len {}/{} kind {:?}/{:?} fingerprint {}/{}",
                self.values.len(),
                other.values.len(),
                self.kind,
                other.kind,
                self.fingerprint,
                other.fingerprint
            )));
        }
        Ok(())
    }
}

/// Common surface of models whose shared gradients can be attacked.
pub trait GradientModel {
    /// Input dimension J.
    fn input_dim(&self) -> usize;

    /// Weight count M.
    fn weight_count(&self) -> usize;

    fn fingerprint(&self) -> ModelFingerprint;

    fn task(&self) -> Task;

    /// Model prediction: ⟨Z⟩ for regression, probability for classification.
    fn predict(&self, x: &[f64]) -> Result<f64>;

    /// Exact derivative of the prediction w.r.t. every weight.
    fn prediction_gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// ∂(ŷ − y)²/∂θ for one row.
    fn loss_gradient(&self, x: &[f64], y: f64) -> Result<GradientVector> {
        self.check_target(y)?;
        let pred = self.predict(x)?;
        let mut values = self.prediction_gradient(x)?;
        let residual = 2.0 * (pred - y);
        for v in &mut values {
            *v *= residual;
        }
        Ok(GradientVector::new(values, 1, GradientKind::Loss, self.fingerprint()))
    }

    /// The quantity a client shares for a batch: the mean over rows of
    /// either loss gradients or prediction gradients.
    fn shared_gradient(&self, batch: &[(Vec<f64>, f64)], kind: GradientKind) -> Result<GradientVector> {
        if batch.is_empty() {
            return Err(Error::Input("gradient of an empty batch".into()));
        }
        let mut sum = vec![0.0; self.weight_count()];
        for (x, y) in batch {
            let row = match kind {
                GradientKind::Loss => self.loss_gradient(x, *y)?.values,
                GradientKind::Prediction => self.prediction_gradient(x)?,
            };
            for (s, v) in sum.iter_mut().zip(&row) {
                *s += v;
            }
        }
        let scale = 1.0 / batch.len() as f64;
        for s in &mut sum {
            *s *= scale;
        }
        Ok(GradientVector::new(sum, batch.len(), kind, self.fingerprint()))
    }

    fn check_target(&self, y: f64) -> Result<()> {
        if !y.is_finite() {
            return Err(Error::Input(format!("non-finite target {y}")));
        }
        if self.task() == Task::BinaryClassification && y != 0.0 && y != 1.0 {
            return Err(Error::Input(format!("classification target must be 0 or 1, got {y}")));
        }
        Ok(())
    }
}

/// Models that can additionally be trained by the SGD loop.
pub trait SupervisedModel: GradientModel + Clone + Send + Sync {
    fn weights(&self) -> &[f64];

    fn set_weights(&mut self, weights: Vec<f64>) -> Result<()>;

    /// Seeded family-appropriate weight initialization.
    fn init_weights(&mut self, rng: &mut ChaCha8Rng);

    /// Short family label for reports.
    fn family_name(&self) -> String;
}

/// A variational quantum model: feature map, ansatz, weights, readout.
#[derive(Debug, Clone)]
pub struct VqnnModel {
    family: ModelFamily,
    feature_map: CircuitSpec,
    ansatz: CircuitSpec,
    reps: usize,
    theta: Vec<f64>,
    task: Task,
    readout_qubit: usize,
    fingerprint: ModelFingerprint,
}

impl VqnnModel {
    /// Build a model with all-ones weights (the initialization attacked in
    /// the single-round experiments).
    pub fn new(family: ModelFamily, qubits: usize, reps: Option<usize>, task: Task) -> Result<Self> {
        let reps = reps.unwrap_or_else(|| family.default_reps());
        let feature_map = CircuitSpec::feature_map(family.feature_map(), qubits)?;
        let ansatz = CircuitSpec::ansatz(family.ansatz(), qubits, reps)?;
        let theta = vec![1.0; ansatz.weight_count()];
        let mut model = VqnnModel {
            family,
            feature_map,
            ansatz,
            reps,
            theta,
            task,
            readout_qubit: 0,
            fingerprint: ModelFingerprint(0),
        };
        model.refresh_fingerprint();
        Ok(model)
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        self.set_weights(theta)?;
        Ok(self)
    }

    pub fn with_readout(mut self, qubit: usize) -> Result<Self> {
        if qubit >= self.qubits() {
            return Err(Error::Config(format!(
                "readout qubit {} out of range for {} qubits",
                qubit,
                self.qubits()
            )));
        }
        self.readout_qubit = qubit;
        self.refresh_fingerprint();
        Ok(self)
    }

    fn refresh_fingerprint(&mut self) {
        self.fingerprint = fingerprint_bytes(
            self.family.name(),
            &[
                self.qubits(),
                self.reps,
                self.readout_qubit,
                match self.task {
                    Task::Regression => 0,
                    Task::BinaryClassification => 1,
                },
            ],
            &self.theta,
        );
    }

    pub fn family(&self) -> ModelFamily {
        self.family
    }

    pub fn qubits(&self) -> usize {
        self.feature_map.qubits()
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn readout_qubit(&self) -> usize {
        self.readout_qubit
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.qubits() {
            return Err(Error::Config(format!(
                "input dimension {} does not match qubit count {}",
                x.len(),
                self.qubits()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite input feature".into()));
        }
        Ok(())
    }

    fn map_readout(&self, z: f64) -> f64 {
        match self.task {
            Task::Regression => z,
            Task::BinaryClassification => 0.5 * (1.0 + z),
        }
    }

    /// State after the feature map, before the ansatz.
    fn encoded_state(&self, x: &[f64]) -> Result<StateVector> {
        let mut state = StateVector::zero(self.qubits())?;
        state.apply_all(&self.feature_map.bind(x, &[])?)?;
        Ok(state)
    }

    /// Raw ⟨Z_readout⟩ expectation of the full circuit.
    pub fn expectation(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut state = self.encoded_state(x)?;
        state.apply_all(&self.ansatz.bind(&[], &self.theta)?)?;
        state.expect_z(self.readout_qubit)
    }

    /// Batch mean of per-row loss gradients, Σ divided by B.
    pub fn batch_loss_gradient(
        &self,
        batch: &[(Vec<f64>, f64)],
        batch_size: usize,
    ) -> Result<GradientVector> {
        if batch.len() != batch_size {
            return Err(Error::Input(format!(
                "declared batch size {} does not match {} rows",
                batch_size,
                batch.len()
            )));
        }
        self.shared_gradient(batch, GradientKind::Loss)
    }
}

impl GradientModel for VqnnModel {
    fn input_dim(&self) -> usize {
        self.qubits()
    }

    fn weight_count(&self) -> usize {
        self.ansatz.weight_count()
    }

    fn fingerprint(&self) -> ModelFingerprint {
        self.fingerprint
    }

    fn task(&self) -> Task {
        self.task
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.map_readout(self.expectation(x)?))
    }

    /// ±π/2 shift rule per weight: g_m = ½[ŷ(θ + π/2·ê_m) − ŷ(θ − π/2·ê_m)].
    ///
    /// The feature-map prefix does not depend on θ, so it is evaluated once
    /// and each shifted evaluation replays only the ansatz with a single
    /// patched angle.
    fn prediction_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let encoded = self.encoded_state(x)?;
        let mut gates = self.ansatz.bind(&[], &self.theta)?;
        let positions = self.ansatz.weight_gate_positions();
        let mut scratch = encoded.clone();
        let mut grad = Vec::with_capacity(self.weight_count());
        for (m, &pos) in positions.iter().enumerate() {
            let base_angle = self.theta[m];
            let shifted = |delta: f64, scratch: &mut StateVector, gates: &mut [Gate]| -> Result<f64> {
                gates[pos].angle = base_angle + delta;
                scratch.copy_from(&encoded);
                scratch.apply_all(gates)?;
                Ok(self.map_readout(scratch.expect_z(self.readout_qubit)?))
            };
            let plus = shifted(FRAC_PI_2, &mut scratch, &mut gates)?;
            let minus = shifted(-FRAC_PI_2, &mut scratch, &mut gates)?;
            gates[pos].angle = base_angle;
            grad.push(0.5 * (plus - minus));
        }
        Ok(grad)
    }
}

impl SupervisedModel for VqnnModel {
    fn weights(&self) -> &[f64] {
        &self.theta
    }

    fn set_weights(&mut self, weights: Vec<f64>) -> Result<()> {
        if weights.len() != self.ansatz.weight_count() {
            return Err(Error::Config(format!(
                "expected {} weights, got {}",
                self.ansatz.weight_count(),
                weights.len()
            )));
        }
        self.theta = weights;
        self.refresh_fingerprint();
        Ok(())
    }

    /// Uniform in [0, 2π) per weight.
    fn init_weights(&mut self, rng: &mut ChaCha8Rng) {
        let theta: Vec<f64> =
            (0..self.theta.len()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        self.theta = theta;
        self.refresh_fingerprint();
    }

    fn family_name(&self) -> String {
        self.family.name().to_string()
    }
}
