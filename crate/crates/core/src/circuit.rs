//! Symbolic circuit layouts: feature maps and ansatz families.
//!
//! A [`CircuitSpec`] is an ordered gate list whose angles reference either
//! input features or trainable weights. Binding a spec against concrete
//! `(x, θ)` yields a plain [`Gate`] sequence. Every weight index appears in
//! exactly one rotation gate, which keeps the ±π/2 shift rule exact
//! per-parameter.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::statevector::{Gate, GateKind};

/// Input-encoding circuit families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FeatureMapKind {
    /// One RX(x_j) per qubit j.
    AngleRx,
    /// Hadamard layer, RZ(2·x_j) per qubit, and a CNOT-conjugated
    /// RZ(2·(π−x_j)(π−x_{j+1})) block per adjacent pair.
    ZzFeatureMap,
}

/// Trainable circuit families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AnsatzKind {
    /// One RY per qubit. M = q.
    Simple,
    /// RY layer, ring of CNOTs, RY layer. M = 2q.
    SimpleEntangled,
    /// reps × [RY layer, RZ layer, linear CNOT chain]. M = 2·q·reps.
    Complex,
    /// Complex blocks plus a final RY+RZ layer. M = 2·q·(reps+1).
    EfficientSu2,
}

/// Where a gate's angle comes from when the circuit is bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSource {
    Fixed(f64),
    /// `scale * x[index]`
    Input { index: usize, scale: f64 },
    /// `2 * (π − x[first]) * (π − x[second])`
    InputPairZz { first: usize, second: usize },
    /// `θ[index]`
    Weight(usize),
}

/// One gate with a symbolic angle slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolicGate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub angle: Option<AngleSource>,
}

impl SymbolicGate {
    fn fixed(kind: GateKind, target: usize, control: Option<usize>) -> Self {
        SymbolicGate { kind, target, control, angle: None }
    }

    fn rotation(kind: GateKind, target: usize, source: AngleSource) -> Self {
        SymbolicGate { kind, target, control: None, angle: Some(source) }
    }
}

/// Ordered gate list with symbolic slots for inputs and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    qubits: usize,
    gates: Vec<SymbolicGate>,
    weight_count: usize,
    input_dim: usize,
}

impl CircuitSpec {
    /// Build a feature map over `qubits` inputs (J = q).
    pub fn feature_map(kind: FeatureMapKind, qubits: usize) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::Config("feature map needs at least one qubit".into()));
        }
        let mut gates = Vec::new();
        match kind {
            FeatureMapKind::AngleRx => {
                for j in 0..qubits {
                    gates.push(SymbolicGate::rotation(
                        GateKind::Rx,
                        j,
                        AngleSource::Input { index: j, scale: 1.0 },
                    ));
                }
            }
            FeatureMapKind::ZzFeatureMap => {
                for j in 0..qubits {
                    gates.push(SymbolicGate::fixed(GateKind::H, j, None));
                }
                for j in 0..qubits {
                    gates.push(SymbolicGate::rotation(
                        GateKind::Rz,
                        j,
                        AngleSource::Input { index: j, scale: 2.0 },
                    ));
                }
                for j in 0..qubits.saturating_sub(1) {
                    gates.push(SymbolicGate::fixed(GateKind::Cnot, j + 1, Some(j)));
                    gates.push(SymbolicGate::rotation(
                        GateKind::Rz,
                        j + 1,
                        AngleSource::InputPairZz { first: j, second: j + 1 },
                    ));
                    gates.push(SymbolicGate::fixed(GateKind::Cnot, j + 1, Some(j)));
                }
            }
        }
        Ok(CircuitSpec { qubits, gates, weight_count: 0, input_dim: qubits })
    }

    /// Build an ansatz; `reps` is ignored by the Simple families.
    pub fn ansatz(kind: AnsatzKind, qubits: usize, reps: usize) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::Config("ansatz needs at least one qubit".into()));
        }
        if reps == 0 {
            return Err(Error::Config("ansatz layer repetitions must be >= 1".into()));
        }
        let mut gates = Vec::new();
        let mut next_weight = 0;
        let mut rotation_layer = |gates: &mut Vec<SymbolicGate>, kind: GateKind| {
            for j in 0..qubits {
                gates.push(SymbolicGate::rotation(kind, j, AngleSource::Weight(next_weight)));
                next_weight += 1;
            }
        };
        match kind {
            AnsatzKind::Simple => {
                rotation_layer(&mut gates, GateKind::Ry);
            }
            AnsatzKind::SimpleEntangled => {
                rotation_layer(&mut gates, GateKind::Ry);
                if qubits > 1 {
                    for j in 0..qubits {
                        gates.push(SymbolicGate::fixed(GateKind::Cnot, (j + 1) % qubits, Some(j)));
                    }
                }
                rotation_layer(&mut gates, GateKind::Ry);
            }
            AnsatzKind::Complex | AnsatzKind::EfficientSu2 => {
                for _ in 0..reps {
                    rotation_layer(&mut gates, GateKind::Ry);
                    rotation_layer(&mut gates, GateKind::Rz);
                    for j in 0..qubits.saturating_sub(1) {
                        gates.push(SymbolicGate::fixed(GateKind::Cnot, j + 1, Some(j)));
                    }
                }
                if kind == AnsatzKind::EfficientSu2 {
                    rotation_layer(&mut gates, GateKind::Ry);
                    rotation_layer(&mut gates, GateKind::Rz);
                }
            }
        }
        Ok(CircuitSpec { qubits, gates, weight_count: next_weight, input_dim: 0 })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Number of weight slots (M for an ansatz, 0 for a feature map).
    pub fn weight_count(&self) -> usize {
        self.weight_count
    }

    /// Number of input features referenced (J for a feature map, 0 for an ansatz).
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn gates(&self) -> &[SymbolicGate] {
        &self.gates
    }

    /// Positions (into the bound gate list) of the gate carrying each weight.
    pub fn weight_gate_positions(&self) -> Vec<usize> {
        let mut positions = vec![usize::MAX; self.weight_count];
        for (pos, gate) in self.gates.iter().enumerate() {
            if let Some(AngleSource::Weight(m)) = gate.angle {
                positions[m] = pos;
            }
        }
        positions
    }

    fn resolve(&self, source: AngleSource, x: &[f64], theta: &[f64]) -> f64 {
        match source {
            AngleSource::Fixed(a) => a,
            AngleSource::Input { index, scale } => scale * x[index],
            AngleSource::InputPairZz { first, second } => {
                2.0 * (PI - x[first]) * (PI - x[second])
            }
            AngleSource::Weight(index) => theta[index],
        }
    }

    /// Bind symbolic slots against concrete inputs and weights.
    pub fn bind(&self, x: &[f64], theta: &[f64]) -> Result<Vec<Gate>> {
        if x.len() < self.input_dim {
            return Err(Error::Input(format!(
                "circuit references {} input features, got {}",
                self.input_dim,
                x.len()
            )));
        }
        if theta.len() < self.weight_count {
            return Err(Error::Input(format!(
                "circuit references {} weights, got {}",
                self.weight_count,
                theta.len()
            )));
        }
        Ok(self
            .gates
            .iter()
            .map(|g| Gate {
                kind: g.kind,
                target: g.target,
                control: g.control,
                angle: g.angle.map(|a| self.resolve(a, x, theta)).unwrap_or(0.0),
            })
            .collect())
    }
}
