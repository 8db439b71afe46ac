//! Dense statevector simulation of few-qubit circuits.
//!
//! Basis ordering: qubit 0 is the **most significant bit** of the basis
//! index, so for a 2-qubit register the amplitudes are ordered
//! |00⟩, |01⟩, |10⟩, |11⟩ with the left bit belonging to qubit 0. All
//! arithmetic is in `f64`; gates are applied as strided pair updates in
//! O(2^q) without materialising full matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported register size.
pub const MAX_QUBITS: usize = 12;

/// Supported gate set. Rotations are generated by a Pauli with eigenvalues
/// ±1/2, so the π/2 parameter-shift rule is exact for every angle slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    Cnot,
    Crz,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Crz)
    }

    pub fn is_controlled(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::Crz)
    }
}

/// A concrete gate with bound angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    /// Rotation angle in radians; ignored for H and CNOT.
    pub angle: f64,
}

impl Gate {
    pub fn rx(target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Rx, target, control: None, angle }
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Ry, target, control: None, angle }
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Rz, target, control: None, angle }
    }

    pub fn h(target: usize) -> Self {
        Gate { kind: GateKind::H, target, control: None, angle: 0.0 }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::Cnot, target, control: Some(control), angle: 0.0 }
    }

    pub fn crz(control: usize, target: usize, angle: f64) -> Self {
        Gate { kind: GateKind::Crz, target, control: Some(control), angle }
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        if self.target >= qubits {
            return Err(Error::Config(format!(
                "gate target {} out of range for {} qubits",
                self.target, qubits
            )));
        }
        match (self.kind.is_controlled(), self.control) {
            (true, None) => {
                return Err(Error::Config(format!("{:?} gate requires a control qubit", self.kind)))
            }
            (false, Some(_)) => {
                return Err(Error::Config(format!("{:?} gate takes no control qubit", self.kind)))
            }
            (true, Some(c)) => {
                if c >= qubits {
                    return Err(Error::Config(format!(
                        "gate control {} out of range for {} qubits",
                        c, qubits
                    )));
                }
                if c == self.target {
                    return Err(Error::Config(format!(
                        "gate control and target coincide on qubit {}",
                        c
                    )));
                }
            }
            (false, None) => {}
        }
        Ok(())
    }
}

/// Complex amplitude vector of length 2^q over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros product state |0⟩^⊗q.
    pub fn zero(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count {} outside supported range 1..={}",
                qubits, MAX_QUBITS
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Squared L2 norm; 1 within 1e-12 for any state produced by this module.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Reset to |0⟩^⊗q without reallocating.
    pub fn reset_zero(&mut self) {
        self.amplitudes.fill(Complex64::new(0.0, 0.0));
        self.amplitudes[0] = Complex64::new(1.0, 0.0);
    }

    /// Copy amplitudes from another state of the same size.
    pub fn copy_from(&mut self, other: &StateVector) {
        debug_assert_eq!(self.qubits, other.qubits);
        self.amplitudes.copy_from_slice(&other.amplitudes);
    }

    // Stride between the bit=0 and bit=1 halves of a qubit's pairs.
    fn stride(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    /// Apply a gate, returning the new state.
    pub fn apply_gate(&self, gate: &Gate) -> Result<StateVector> {
        let mut next = self.clone();
        next.apply_mut(gate)?;
        Ok(next)
    }

    /// Apply a gate in place.
    pub fn apply_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubits)?;
        match gate.kind {
            GateKind::Rx => {
                let half = 0.5 * gate.angle;
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(0.0, -half.sin());
                self.pair_update(gate.target, c, s, s, c);
            }
            GateKind::Ry => {
                let half = 0.5 * gate.angle;
                let c = Complex64::new(half.cos(), 0.0);
                let s = Complex64::new(half.sin(), 0.0);
                self.pair_update(gate.target, c, -s, s, c);
            }
            GateKind::Rz => {
                let half = 0.5 * gate.angle;
                let phase0 = Complex64::from_polar(1.0, -half);
                let phase1 = Complex64::from_polar(1.0, half);
                let stride = self.stride(gate.target);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    *amp *= if i & stride == 0 { phase0 } else { phase1 };
                }
            }
            GateKind::H => {
                let f = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.pair_update(gate.target, f, f, f, -f);
            }
            GateKind::Cnot => {
                let cs = self.stride(gate.control.expect("validated"));
                let ts = self.stride(gate.target);
                for i in 0..self.amplitudes.len() {
                    if i & cs != 0 && i & ts == 0 {
                        self.amplitudes.swap(i, i | ts);
                    }
                }
            }
            GateKind::Crz => {
                let half = 0.5 * gate.angle;
                let phase0 = Complex64::from_polar(1.0, -half);
                let phase1 = Complex64::from_polar(1.0, half);
                let cs = self.stride(gate.control.expect("validated"));
                let ts = self.stride(gate.target);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & cs != 0 {
                        *amp *= if i & ts == 0 { phase0 } else { phase1 };
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply a gate sequence in place.
    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<()> {
        for gate in gates {
            self.apply_mut(gate)?;
        }
        Ok(())
    }

    // In-place 2x2 update over all index pairs of `target`.
    fn pair_update(
        &mut self,
        target: usize,
        u00: Complex64,
        u01: Complex64,
        u10: Complex64,
        u11: Complex64,
    ) {
        let stride = self.stride(target);
        let len = self.amplitudes.len();
        let mut base = 0;
        while base < len {
            for offset in base..base + stride {
                let i = offset;
                let j = offset + stride;
                let a = self.amplitudes[i];
                let b = self.amplitudes[j];
                self.amplitudes[i] = u00 * a + u01 * b;
                self.amplitudes[j] = u10 * a + u11 * b;
            }
            base += 2 * stride;
        }
    }

    /// Expectation value of Pauli-Z on `qubit`: Σ ±|amplitude|², signed by
    /// the qubit's bit value. Always in [−1, 1].
    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.qubits {
            return Err(Error::Config(format!(
                "qubit {} out of range for {} qubits",
                qubit, self.qubits
            )));
        }
        let stride = self.stride(qubit);
        let mut value = 0.0;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if i & stride == 0 {
                value += p;
            } else {
                value -= p;
            }
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_layout() {
        let s = StateVector::zero(1).unwrap();
        assert_eq!(s.amplitudes().len(), 2);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));

        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm_sqr() == 0.0));
    }

    #[test]
    fn zero_qubits_rejected() {
        assert!(matches!(StateVector::zero(0), Err(Error::Config(_))));
        assert!(matches!(StateVector::zero(MAX_QUBITS + 1), Err(Error::Config(_))));
    }

    #[test]
    fn rx_zero_angle_is_identity() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_mut(&Gate::h(0)).unwrap();
        let before = s.clone();
        s.apply_mut(&Gate::rx(0, 0.0)).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn rx_pi_flips_z_expectation() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_mut(&Gate::rx(0, PI)).unwrap();
        assert_abs_diff_eq!(s.expect_z(0).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn cnot_truth_table() {
        // |10⟩ → |11⟩ with qubit 0 as the most significant bit.
        let mut s = StateVector::zero(2).unwrap();
        s.apply_mut(&Gate::rx(0, PI)).unwrap(); // |0⟩→|1⟩ on qubit 0 up to phase
        s.apply_mut(&Gate::cnot(0, 1)).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0b11].norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expect_z_basis_and_superposition() {
        let s = StateVector::zero(3).unwrap();
        assert_eq!(s.expect_z(0).unwrap(), 1.0);

        let mut s = StateVector::zero(1).unwrap();
        s.apply_mut(&Gate::h(0)).unwrap();
        assert_abs_diff_eq!(s.expect_z(0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn expect_z_out_of_range() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(s.expect_z(2), Err(Error::Config(_))));
    }

    #[test]
    fn control_equals_target_rejected() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(s.apply_mut(&Gate::cnot(1, 1)), Err(Error::Config(_))));
    }

    /// Oracle: explicit 2×2 complex matrix products for RY(θ)·RX(x)·|0⟩.
    fn ry_rx_expect_z(x: f64, theta: f64) -> f64 {
        let rx = [
            [
                Complex64::new((x / 2.0).cos(), 0.0),
                Complex64::new(0.0, -(x / 2.0).sin()),
            ],
            [
                Complex64::new(0.0, -(x / 2.0).sin()),
                Complex64::new((x / 2.0).cos(), 0.0),
            ],
        ];
        let ry = [
            [
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::new(-(theta / 2.0).sin(), 0.0),
            ],
            [
                Complex64::new((theta / 2.0).sin(), 0.0),
                Complex64::new((theta / 2.0).cos(), 0.0),
            ],
        ];
        // |ψ⟩ = RY · RX · (1, 0)
        let v = [rx[0][0], rx[1][0]];
        let a = ry[0][0] * v[0] + ry[0][1] * v[1];
        let b = ry[1][0] * v[0] + ry[1][1] * v[1];
        a.norm_sqr() - b.norm_sqr()
    }

    #[test]
    fn single_qubit_circuit_matches_matrix_oracle() {
        for i in 0..20 {
            for j in 0..20 {
                let x = PI * i as f64 / 19.0;
                let theta = 2.0 * PI * j as f64 / 19.0;
                let mut s = StateVector::zero(1).unwrap();
                s.apply_mut(&Gate::rx(0, x)).unwrap();
                s.apply_mut(&Gate::ry(0, theta)).unwrap();
                let expected = ry_rx_expect_z(x, theta);
                assert_abs_diff_eq!(s.expect_z(0).unwrap(), expected, epsilon = 1e-13);
                // and the closed form
                assert_abs_diff_eq!(expected, x.cos() * theta.cos(), epsilon = 1e-13);
            }
        }
    }

    fn random_gate<R: Rng>(rng: &mut R, qubits: usize) -> Gate {
        let target = rng.random_range(0..qubits);
        match rng.random_range(0..6) {
            0 => Gate::rx(target, rng.random_range(-PI..PI)),
            1 => Gate::ry(target, rng.random_range(-PI..PI)),
            2 => Gate::rz(target, rng.random_range(-PI..PI)),
            3 => Gate::h(target),
            k => {
                let mut control = rng.random_range(0..qubits);
                while control == target {
                    control = rng.random_range(0..qubits);
                }
                if k == 4 {
                    Gate::cnot(control, target)
                } else {
                    Gate::crz(control, target, rng.random_range(-PI..PI))
                }
            }
        }
    }

    #[test]
    fn norm_preserved_over_random_gates() {
        let mut rng = crate::rng::stream(11, "statevector-test");
        let mut s = StateVector::zero(4).unwrap();
        for _ in 0..1000 {
            let gate = random_gate(&mut rng, 4);
            s.apply_mut(&gate).unwrap();
            assert!((s.norm_sqr().sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_round_trip_restores_state() {
        let mut rng = crate::rng::stream(12, "statevector-test");
        let mut s = StateVector::zero(3).unwrap();
        for _ in 0..50 {
            s.apply_mut(&random_gate(&mut rng, 3)).unwrap();
        }
        for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::Crz] {
            let angle = rng.random_range(-PI..PI);
            let (fwd, bwd) = match kind {
                GateKind::Crz => (Gate::crz(0, 2, angle), Gate::crz(0, 2, -angle)),
                GateKind::Rx => (Gate::rx(1, angle), Gate::rx(1, -angle)),
                GateKind::Ry => (Gate::ry(1, angle), Gate::ry(1, -angle)),
                _ => (Gate::rz(1, angle), Gate::rz(1, -angle)),
            };
            let before = s.clone();
            s.apply_mut(&fwd).unwrap();
            s.apply_mut(&bwd).unwrap();
            for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
                assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
            }
        }
    }
}
