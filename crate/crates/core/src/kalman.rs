//! Scalar Kalman filter used to smooth the attack's per-dimension updates.
//!
//! One independent filter runs per reconstructed input dimension. All
//! parameters start at one and the state at zero, so no prior knowledge of
//! the state or transitions is assumed.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct KalmanScalarState {
    /// Transition F.
    pub transition: f64,
    /// Observation H.
    pub observation: f64,
    /// Process noise Q.
    pub process_noise: f64,
    /// Measurement noise R.
    pub measurement_noise: f64,
    /// State covariance P; stays positive.
    pub covariance: f64,
    /// Current state estimate x̂.
    pub estimate: f64,
}

impl Default for KalmanScalarState {
    fn default() -> Self {
        KalmanScalarState {
            transition: 1.0,
            observation: 1.0,
            process_noise: 1.0,
            measurement_noise: 1.0,
            covariance: 1.0,
            estimate: 0.0,
        }
    }
}

impl KalmanScalarState {
    /// One predict/update cycle; returns the fused estimate.
    ///
    /// Predict: x̂⁻ = F·x̂, P̂ = F·P·F + Q. Update: S = H·P̂·H + R,
    /// D = P̂·H/S, fused = x̂⁻ + D·(m − H·x̂⁻), P ← (1 − D·H)·P̂.
    pub fn step(&mut self, measurement: f64) -> Result<f64> {
        let predicted = self.transition * self.estimate;
        let predicted_cov = self.transition * self.covariance * self.transition + self.process_noise;

        let innovation = measurement - self.observation * predicted;
        let innovation_cov =
            self.observation * predicted_cov * self.observation + self.measurement_noise;
        if innovation_cov <= 0.0 || !innovation_cov.is_finite() {
            return Err(Error::Runtime(format!(
                "kalman innovation covariance {innovation_cov} is not positive"
            )));
        }
        let gain = predicted_cov * self.observation / innovation_cov;

        self.estimate = predicted + gain * innovation;
        self.covariance = (1.0 - gain * self.observation) * predicted_cov;
        Ok(self.estimate)
    }
}
