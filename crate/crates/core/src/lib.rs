//! Simulation of small variational quantum models, federated gradient
//! sharing, and numerical gradient-inversion attacks against the shared
//! gradients.
//!
//! The crate is organised bottom-up:
//!
//! - [`statevector`]: dense complex statevector with strided gate updates
//! - [`circuit`]: symbolic feature-map / ansatz layouts
//! - [`model`]: variational models with exact parameter-shift gradients
//! - [`mlp`]: a small dense network baseline with analytic gradients
//! - [`datasets`]: cosine generator, IDX image ingestion, fraud CSV ingestion
//! - [`trainer`]: SGD training loop with k-fold cross-validation
//! - [`flsim`]: in-process federated round with an intercepted client share
//! - [`privacy`]: Gaussian noise on shared gradients and the noise sweep
//! - [`kalman`]: scalar predict/update filter used by the attack
//! - [`attack`]: filtered finite-difference gradient inversion
//! - [`artifacts`]: trace CSV / summary JSON emission

pub mod artifacts;
pub mod attack;
pub mod circuit;
pub mod datasets;
pub mod error;
pub mod flsim;
pub mod kalman;
pub mod metrics;
pub mod mlp;
pub mod model;
pub mod privacy;
pub mod rng;
pub mod statevector;
pub mod trainer;

pub use error::{Error, Result};
pub use model::{GradientKind, GradientModel, GradientVector, ModelFamily, SupervisedModel, Task, VqnnModel};
pub use statevector::{Gate, GateKind, StateVector};
