//! Gradient inversion: reconstruct private inputs from a shared gradient
//! vector by derivative-free descent on the gradient-matching cost.
//!
//! The cost 𝓛(x′) is the mean squared distance between the proxy model's
//! shared gradient at x′ and the intercepted gradient. Its gradient w.r.t.
//! each input coordinate is estimated by central finite differences taken
//! at radii h, 2h, …, Nh and averaged — a moving-average low-pass filter
//! that suppresses the short-wavelength oscillations of the landscape. The
//! window N halves whenever the mean sampled cost stops decreasing, and an
//! optional scalar Kalman filter per coordinate smooths the update path.

use std::time::Instant;

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kalman::KalmanScalarState;
use crate::model::{GradientKind, GradientModel, GradientVector};
use crate::rng;

/// Attack hyperparameters.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct AttackConfig {
    /// Initial moving-average window N₀.
    pub initial_window: usize,
    /// Finite-difference step h in radians.
    pub step: f64,
    /// Descent learning rate.
    pub learning_rate: f64,
    /// Iteration budget K.
    pub max_iterations: usize,
    /// Halve the window when L̄ᵏ/L̄ᵏ⁻¹ exceeds this ratio.
    pub halt_ratio: f64,
    /// Fuse each coordinate update through a scalar Kalman filter.
    pub use_kalman: bool,
    /// Success threshold on MSE(x′, x); also the minimum distance enforced
    /// on random starting points when the ground truth is known.
    pub success_tol: f64,
    /// Attacker-side early stop on the gradient-matching cost.
    pub grad_tol: f64,
    pub seed: u64,
    /// Which gradient quantity was shared and is being matched.
    pub kind: GradientKind,
    /// Targets per batch row; required when `kind` is `Loss`.
    pub known_labels: Option<Vec<f64>>,
    /// Record wall-clock per trace row. Off by default so rerunning a
    /// seeded attack reproduces output files byte for byte.
    pub collect_timing: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            initial_window: 64,
            step: 0.05,
            learning_rate: 0.1,
            max_iterations: 250,
            halt_ratio: 1.0,
            use_kalman: true,
            success_tol: 5e-3,
            grad_tol: 1e-12,
            seed: 0,
            kind: GradientKind::Prediction,
            known_labels: None,
            collect_timing: false,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_window == 0 {
            return Err(Error::Config("attack window must be >= 1".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::Config("finite-difference step must be > 0".into()));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("attack learning rate must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("attack needs at least one iteration".into()));
        }
        if self.kind == GradientKind::Loss && self.known_labels.is_none() {
            return Err(Error::Config(
                "matching loss gradients requires known labels; use the label-free \
                 prediction kind otherwise"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Mean squared distance between two comparable gradient vectors.
pub fn gradient_cost(proxy: &GradientVector, target: &GradientVector) -> Result<f64> {
    target.check_comparable(proxy)?;
    let m = target.len() as f64;
    Ok(proxy
        .values()
        .iter()
        .zip(target.values())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / m)
}

/// A cost over a flat coordinate vector whose coordinates can be perturbed
/// in place. Implemented by the proxy-gradient cost and by synthetic costs
/// in tests.
pub trait PerturbableCost {
    fn dims(&self) -> usize;
    fn coordinate(&self, dim: usize) -> f64;
    fn set_coordinate(&mut self, dim: usize, value: f64);
    fn eval(&mut self) -> Result<f64>;
}

/// Filtered central-difference estimate along one coordinate.
///
/// Returns `(gradient, mean_loss)` where the gradient is the mean of the
/// per-radius central differences [𝓛(x+nh) − 𝓛(x−nh)]/(2nh) for n = 1..N
/// and `mean_loss` is the mean of the 2N sampled costs, used by the caller
/// for the window-halving test.
pub fn filtered_fd<C: PerturbableCost>(
    cost: &mut C,
    dim: usize,
    window: usize,
    step: f64,
) -> Result<(f64, f64)> {
    debug_assert!(window >= 1 && step > 0.0);
    let base = cost.coordinate(dim);
    let mut grad_sum = 0.0;
    let mut loss_sum = 0.0;
    for n in 1..=window {
        let radius = n as f64 * step;
        cost.set_coordinate(dim, base + radius);
        let plus = cost.eval()?;
        cost.set_coordinate(dim, base - radius);
        let minus = cost.eval()?;
        grad_sum += (plus - minus) / (2.0 * radius);
        loss_sum += plus + minus;
    }
    cost.set_coordinate(dim, base);
    Ok((grad_sum / window as f64, loss_sum / (2.0 * window as f64)))
}

/// The gradient-matching cost for a proxy batch, with coordinates flattened
/// row-major over (batch row, input dimension).
pub struct ProxyCost<'a, M: GradientModel> {
    model: &'a M,
    target: &'a GradientVector,
    rows: Vec<(Vec<f64>, f64)>,
    kind: GradientKind,
    input_dim: usize,
}

impl<'a, M: GradientModel> ProxyCost<'a, M> {
    pub fn new(
        model: &'a M,
        target: &'a GradientVector,
        flat: &[f64],
        labels: Option<&[f64]>,
        kind: GradientKind,
    ) -> Result<Self> {
        let input_dim = model.input_dim();
        if flat.is_empty() || flat.len() % input_dim != 0 {
            return Err(Error::Input(format!(
                "proxy vector length {} is not a multiple of input dimension {}",
                flat.len(),
                input_dim
            )));
        }
        let batch = flat.len() / input_dim;
        let labels = match (kind, labels) {
            (GradientKind::Loss, Some(l)) => {
                if l.len() != batch {
                    return Err(Error::Input(format!(
                        "{} labels for a batch of {}",
                        l.len(),
                        batch
                    )));
                }
                l.to_vec()
            }
            (GradientKind::Loss, None) => {
                return Err(Error::Config("loss-gradient matching requires labels".into()))
            }
            (GradientKind::Prediction, _) => vec![0.0; batch],
        };
        let rows = flat
            .chunks(input_dim)
            .zip(labels)
            .map(|(x, y)| (x.to_vec(), y))
            .collect();
        Ok(ProxyCost { model, target, rows, kind, input_dim })
    }

    pub fn flat(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|(x, _)| x.iter().copied()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|(x, _)| x.clone()).collect()
    }
}

impl<M: GradientModel> PerturbableCost for ProxyCost<'_, M> {
    fn dims(&self) -> usize {
        self.rows.len() * self.input_dim
    }

    fn coordinate(&self, dim: usize) -> f64 {
        self.rows[dim / self.input_dim].0[dim % self.input_dim]
    }

    fn set_coordinate(&mut self, dim: usize, value: f64) {
        self.rows[dim / self.input_dim].0[dim % self.input_dim] = value;
    }

    fn eval(&mut self) -> Result<f64> {
        let proxy = self.model.shared_gradient(&self.rows, self.kind)?;
        gradient_cost(&proxy, self.target)
    }
}

/// Filtered finite-difference gradient of the gradient-matching cost along
/// input dimension `dim` at the proxy point `flat` (batch rows flattened).
pub fn filtered_fd_gradient<M: GradientModel>(
    model: &M,
    target: &GradientVector,
    flat: &[f64],
    labels: Option<&[f64]>,
    kind: GradientKind,
    dim: usize,
    window: usize,
    step: f64,
) -> Result<(f64, f64)> {
    if window == 0 {
        return Err(Error::Config("window must be >= 1".into()));
    }
    if step <= 0.0 {
        return Err(Error::Config("step must be > 0".into()));
    }
    let mut cost = ProxyCost::new(model, target, flat, labels, kind)?;
    if dim >= cost.dims() {
        return Err(Error::Input(format!("dimension {dim} out of range")));
    }
    filtered_fd(&mut cost, dim, window, step)
}

/// Per-iteration record of an attack run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Gradient-matching cost 𝓛 at the (unperturbed) current point.
    pub loss: f64,
    /// MSE(x′, x); present only when the ground truth was supplied.
    pub input_mse: Option<f64>,
    /// Window in effect during this iteration.
    pub window: usize,
    /// Cumulative wall clock; zero unless timing collection is enabled.
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SuccessEval {
    pub success: bool,
    pub mse: f64,
}

#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub trace: Vec<TraceRow>,
    /// Reconstructed batch rows.
    pub recovered: Vec<Vec<f64>>,
    pub final_loss: f64,
    pub evaluation: Option<SuccessEval>,
}

impl AttackOutcome {
    /// First iteration whose recorded input MSE is at or below `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|row| row.input_mse.is_some_and(|m| m <= tol))
            .map(|row| row.iteration)
    }
}

/// Permutation-minimized mean squared error between reconstructed and true
/// batch rows. Rows of a batch are interchangeable because the shared
/// gradient sums over them.
pub fn evaluate_success(
    recovered: &[Vec<f64>],
    truth: &[Vec<f64>],
    tol: f64,
) -> Result<SuccessEval> {
    if recovered.len() != truth.len()
        || recovered.iter().zip(truth).any(|(a, b)| a.len() != b.len())
    {
        return Err(Error::Input(format!(
            "shape mismatch: {} rows vs {}",
            recovered.len(),
            truth.len()
        )));
    }
    let total: usize = truth.iter().map(|r| r.len()).sum();
    let mse = (0..recovered.len())
        .permutations(recovered.len())
        .map(|perm| {
            perm.iter()
                .zip(truth)
                .map(|(&ri, t)| {
                    recovered[ri]
                        .iter()
                        .zip(t)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                })
                .sum::<f64>()
                / total as f64
        })
        .fold(f64::INFINITY, f64::min);
    Ok(SuccessEval { success: mse <= tol, mse })
}

fn mse_of(cost_rows: &[Vec<f64>], truth: Option<&[Vec<f64>]>, tol: f64) -> Option<f64> {
    truth.map(|t| evaluate_success(cost_rows, t, tol).map(|e| e.mse).unwrap_or(f64::NAN))
}

/// Run the inversion attack against a shared gradient.
///
/// The attacker knows the model architecture and weights (the federated
/// assumption) but not the inputs. When `ground_truth` is supplied it is
/// used only for evaluation: the starting point is re-drawn until it is at
/// least `success_tol` away, and the trace records MSE(x′, x) per
/// iteration.
pub fn run_attack<M: GradientModel>(
    model: &M,
    shared: &GradientVector,
    cfg: &AttackConfig,
    ground_truth: Option<&[Vec<f64>]>,
    batch_guess: usize,
) -> Result<AttackOutcome> {
    cfg.validate()?;
    if batch_guess != shared.batch_size() {
        return Err(Error::Config(format!(
            "guessed batch size {} does not match the shared gradient's batch size {}",
            batch_guess,
            shared.batch_size()
        )));
    }
    if cfg.kind != shared.kind() {
        return Err(Error::ModelMismatch(format!(
            "attack configured for {:?} gradients but the share carries {:?}",
            cfg.kind,
            shared.kind()
        )));
    }
    let input_dim = model.input_dim();
    if let Some(truth) = ground_truth {
        if truth.len() != batch_guess || truth.iter().any(|r| r.len() != input_dim) {
            return Err(Error::Input("ground truth shape does not match the guess".into()));
        }
    }

    let flat_dims = batch_guess * input_dim;
    let mut rng = rng::stream(cfg.seed, "attack-init");
    let mut flat = draw_start(&mut rng, flat_dims);
    if let Some(truth) = ground_truth {
        let mut tries = 0;
        while evaluate_success(&chunk_rows(&flat, input_dim), truth, cfg.success_tol)?.mse
            < cfg.success_tol
        {
            flat = draw_start(&mut rng, flat_dims);
            tries += 1;
            if tries > 1000 {
                return Err(Error::Runtime(
                    "could not draw a starting point away from the ground truth".into(),
                ));
            }
        }
    }

    let started = Instant::now();
    let stamp = |on: bool| if on { started.elapsed().as_millis() as u64 } else { 0 };

    let mut cost = ProxyCost::new(model, shared, &flat, cfg.known_labels.as_deref(), cfg.kind)?;
    let mut window = cfg.initial_window;
    let mut trace = Vec::with_capacity(cfg.max_iterations + 1);

    let initial_loss = cost.eval()?;
    trace.push(TraceRow {
        iteration: 0,
        loss: initial_loss,
        input_mse: mse_of(&cost.rows(), ground_truth, cfg.success_tol),
        window,
        wall_ms: stamp(cfg.collect_timing),
    });

    let mut kalman: Vec<KalmanScalarState> = if cfg.use_kalman {
        vec![KalmanScalarState::default(); flat_dims]
    } else {
        Vec::new()
    };
    let mut prev_mean_loss: Option<f64> = None;
    let mut final_loss = initial_loss;

    if initial_loss >= cfg.grad_tol {
        for k in 1..=cfg.max_iterations {
            let mut sampled_loss_sum = 0.0;
            for dim in 0..flat_dims {
                let (grad, mean_loss) = filtered_fd(&mut cost, dim, window, cfg.step)?;
                if !grad.is_finite() {
                    return Err(Error::Runtime(format!(
                        "non-finite cost gradient at iteration {k}, dimension {dim}"
                    )));
                }
                let descended = cost.coordinate(dim) - cfg.learning_rate * grad;
                let updated = if cfg.use_kalman { kalman[dim].step(descended)? } else { descended };
                cost.set_coordinate(dim, updated);
                sampled_loss_sum += mean_loss;
            }
            let mean_loss = sampled_loss_sum / flat_dims as f64;

            let loss = cost.eval()?;
            if !loss.is_finite() {
                return Err(Error::Runtime(format!("non-finite cost at iteration {k}")));
            }
            final_loss = loss;
            trace.push(TraceRow {
                iteration: k,
                loss,
                input_mse: mse_of(&cost.rows(), ground_truth, cfg.success_tol),
                window,
                wall_ms: stamp(cfg.collect_timing),
            });
            if loss < cfg.grad_tol {
                break;
            }

            if let Some(prev) = prev_mean_loss {
                let stalled = if prev > 0.0 {
                    mean_loss / prev > cfg.halt_ratio
                } else {
                    mean_loss > 0.0
                };
                if stalled {
                    window = (window / 2).max(1);
                }
            }
            prev_mean_loss = Some(mean_loss);
        }
    }

    let recovered = cost.rows();
    let evaluation = match ground_truth {
        Some(truth) => Some(evaluate_success(&recovered, truth, cfg.success_tol)?),
        None => None,
    };
    Ok(AttackOutcome { trace, recovered, final_loss, evaluation })
}

fn draw_start<R: Rng>(rng: &mut R, dims: usize) -> Vec<f64> {
    (0..dims).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect()
}

fn chunk_rows(flat: &[f64], dim: usize) -> Vec<Vec<f64>> {
    flat.chunks(dim).map(|c| c.to_vec()).collect()
}

/// Sample the gradient-matching cost over a 2-D input grid; used for the
/// landscape diagnostics of two-qubit models.
pub fn cost_grid<M: GradientModel>(
    model: &M,
    target: &GradientVector,
    kind: GradientKind,
    labels: Option<&[f64]>,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> Result<Vec<Vec<f64>>> {
    if model.input_dim() != 2 {
        return Err(Error::Config("cost grids are defined for 2-input models".into()));
    }
    if resolution < 2 || hi <= lo {
        return Err(Error::Config("bad grid bounds or resolution".into()));
    }
    let coord = |i: usize| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let mut grid = Vec::with_capacity(resolution);
    for i in 0..resolution {
        let mut row = Vec::with_capacity(resolution);
        for j in 0..resolution {
            let mut cost = ProxyCost::new(model, target, &[coord(i), coord(j)], labels, kind)?;
            row.push(cost.eval()?);
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Count interior grid cells strictly below all eight neighbours.
pub fn count_local_minima(grid: &[Vec<f64>]) -> usize {
    let rows = grid.len();
    if rows < 3 {
        return 0;
    }
    let cols = grid[0].len();
    let mut count = 0;
    for i in 1..rows - 1 {
        for j in 1..cols - 1 {
            let v = grid[i][j];
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let n = grid[(i as i64 + di) as usize][(j as i64 + dj) as usize];
                    if n <= v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelFamily, Task, VqnnModel};
    use approx::assert_abs_diff_eq;

    fn simple_model(theta: Vec<f64>) -> VqnnModel {
        VqnnModel::new(ModelFamily::Simple, 1, None, Task::Regression)
            .unwrap()
            .with_theta(theta)
            .unwrap()
    }

    #[test]
    fn gradient_cost_examples() {
        let model = simple_model(vec![1.0]);
        let g = model.shared_gradient(&[(vec![0.7], 0.0)], GradientKind::Prediction).unwrap();
        assert_eq!(gradient_cost(&g, &g).unwrap(), 0.0);

        let mut shifted = g.clone();
        for v in shifted.values_mut() {
            *v += 1.0;
        }
        assert_abs_diff_eq!(gradient_cost(&shifted, &g).unwrap(), 1.0);

        // Hand case through a synthetic 2-long vector: diff (3, 4) → 12.5.
        let fp = g.fingerprint();
        let a = GradientVector::new(vec![3.0, 4.0], 1, GradientKind::Prediction, fp);
        let b = GradientVector::new(vec![0.0, 0.0], 1, GradientKind::Prediction, fp);
        assert_abs_diff_eq!(gradient_cost(&a, &b).unwrap(), 12.5);
    }

    #[test]
    fn gradient_cost_rejects_mismatched_models() {
        let a = simple_model(vec![1.0]);
        let b = simple_model(vec![0.5]);
        let ga = a.shared_gradient(&[(vec![0.7], 0.0)], GradientKind::Prediction).unwrap();
        let gb = b.shared_gradient(&[(vec![0.7], 0.0)], GradientKind::Prediction).unwrap();
        assert!(matches!(gradient_cost(&ga, &gb), Err(Error::ModelMismatch(_))));
    }

    struct Quadratic {
        x: Vec<f64>,
        center: Vec<f64>,
    }

    impl PerturbableCost for Quadratic {
        fn dims(&self) -> usize {
            self.x.len()
        }
        fn coordinate(&self, dim: usize) -> f64 {
            self.x[dim]
        }
        fn set_coordinate(&mut self, dim: usize, value: f64) {
            self.x[dim] = value;
        }
        fn eval(&mut self) -> Result<f64> {
            Ok(self.x.iter().zip(&self.center).map(|(a, c)| (a - c).powi(2)).sum())
        }
    }

    #[test]
    fn filtered_fd_exact_on_quadratics() {
        // Central differences are exact on quadratics at every radius, so
        // the filtered estimate equals 2(x − a) for any window and step.
        let mut cost = Quadratic { x: vec![1.3, -0.4], center: vec![0.5, 0.2] };
        for window in [1, 2, 7, 64] {
            for step in [0.01, 0.3, 2.0] {
                let (grad, _) = filtered_fd(&mut cost, 0, window, step).unwrap();
                assert_abs_diff_eq!(grad, 2.0 * (1.3 - 0.5), epsilon = 1e-10);
                let (grad, _) = filtered_fd(&mut cost, 1, window, step).unwrap();
                assert_abs_diff_eq!(grad, 2.0 * (-0.4 - 0.2), epsilon = 1e-10);
            }
        }
        // Coordinates restored after probing.
        assert_eq!(cost.x, vec![1.3, -0.4]);
    }

    #[test]
    fn window_one_is_plain_central_difference() {
        let mut cost = Quadratic { x: vec![2.0], center: vec![0.0] };
        let h = 0.1;
        let (grad, mean) = filtered_fd(&mut cost, 0, 1, h).unwrap();
        let plain = ((2.0f64 + h).powi(2) - (2.0f64 - h).powi(2)) / (2.0 * h);
        assert_abs_diff_eq!(grad, plain, epsilon = 1e-12);
        assert_abs_diff_eq!(mean, ((2.0f64 + h).powi(2) + (2.0f64 - h).powi(2)) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_cost_has_zero_filtered_gradient() {
        // For the 1-qubit model the prediction gradient is −cos(x)·sin(θ),
        // so 𝓛 is even in x′ around 0; odd differences cancel there.
        let model = simple_model(vec![1.0]);
        let target =
            model.shared_gradient(&[(vec![0.9], 0.0)], GradientKind::Prediction).unwrap();
        let (grad, _) = filtered_fd_gradient(
            &model,
            &target,
            &[0.0],
            None,
            GradientKind::Prediction,
            0,
            8,
            0.05,
        )
        .unwrap();
        assert_abs_diff_eq!(grad, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn start_at_truth_stops_immediately() {
        let model = simple_model(vec![1.0]);
        let x = vec![1.1];
        let shared = model
            .shared_gradient(&[(x.clone(), 0.0)], GradientKind::Prediction)
            .unwrap();
        // No ground truth given: draw the starting point manually at x by
        // constructing the cost directly and checking the engine's early exit.
        let cfg = AttackConfig { seed: 5, max_iterations: 50, ..Default::default() };
        // Ground truth path: the engine must avoid starting at the truth, so
        // instead verify via a zero-cost share built at the start point.
        let outcome = run_attack(&model, &shared, &cfg, None, 1).unwrap();
        assert!(outcome.trace.len() > 1 || outcome.final_loss < cfg.grad_tol);

        // Direct zero-at-start check.
        let mut cost = ProxyCost::new(&model, &shared, &x, None, GradientKind::Prediction).unwrap();
        assert!(cost.eval().unwrap() < 1e-30);
    }

    #[test]
    fn one_qubit_attack_recovers_input() {
        let model = simple_model(vec![1.0]);
        let secret = vec![vec![1.3]];
        let shared = model
            .shared_gradient(&[(secret[0].clone(), 0.0)], GradientKind::Prediction)
            .unwrap();
        let cfg = AttackConfig {
            initial_window: 8,
            learning_rate: 0.5,
            max_iterations: 200,
            seed: 42,
            use_kalman: false,
            ..Default::default()
        };
        let outcome = run_attack(&model, &shared, &cfg, Some(&secret), 1).unwrap();
        let eval = outcome.evaluation.unwrap();
        assert!(eval.success, "mse = {}", eval.mse);
        assert!(eval.mse < 1e-4);
    }

    #[test]
    fn attack_is_deterministic() {
        let model = simple_model(vec![1.0]);
        let secret = vec![vec![0.8]];
        let shared = model
            .shared_gradient(&[(secret[0].clone(), 0.0)], GradientKind::Prediction)
            .unwrap();
        let cfg = AttackConfig { seed: 9, max_iterations: 20, initial_window: 4, ..Default::default() };
        let a = run_attack(&model, &shared, &cfg, Some(&secret), 1).unwrap();
        let b = run_attack(&model, &shared, &cfg, Some(&secret), 1).unwrap();
        assert_eq!(a.trace.len(), b.trace.len());
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.loss.to_bits(), rb.loss.to_bits());
            assert_eq!(ra.window, rb.window);
        }
        assert_eq!(a.recovered, b.recovered);
    }

    #[test]
    fn window_never_increases() {
        let model = simple_model(vec![1.0]);
        let secret = vec![vec![2.0]];
        let shared = model
            .shared_gradient(&[(secret[0].clone(), 0.0)], GradientKind::Prediction)
            .unwrap();
        let cfg = AttackConfig { seed: 3, initial_window: 16, max_iterations: 60, ..Default::default() };
        let outcome = run_attack(&model, &shared, &cfg, Some(&secret), 1).unwrap();
        let mut prev = usize::MAX;
        for row in &outcome.trace {
            assert!(row.window <= prev && row.window >= 1);
            prev = row.window;
        }
    }

    #[test]
    fn evaluate_success_permutation_and_shapes() {
        let truth = vec![vec![0.1, 0.2], vec![0.9, 1.4]];
        let swapped = vec![vec![0.9, 1.4], vec![0.1, 0.2]];
        let eval = evaluate_success(&swapped, &truth, 0.005).unwrap();
        assert!(eval.success);
        assert_eq!(eval.mse, 0.0);

        // 1-D offset of 0.1 → mse 0.01 > 0.005.
        let eval = evaluate_success(&[vec![0.6]], &[vec![0.5]], 0.005).unwrap();
        assert!(!eval.success);
        assert_abs_diff_eq!(eval.mse, 0.01, epsilon = 1e-15);

        assert!(evaluate_success(&[vec![0.0]], &truth, 0.005).is_err());
    }

    #[test]
    fn local_minima_counter() {
        // One interior strict minimum.
        let grid = vec![
            vec![3.0, 3.0, 3.0],
            vec![3.0, 1.0, 3.0],
            vec![3.0, 3.0, 3.0],
        ];
        assert_eq!(count_local_minima(&grid), 1);
        // A flat grid has none.
        let flat = vec![vec![1.0; 3]; 3];
        assert_eq!(count_local_minima(&flat), 0);
    }

    #[test]
    fn batch_size_must_match_share() {
        let model = simple_model(vec![1.0]);
        let shared = model
            .shared_gradient(&[(vec![0.5], 0.0)], GradientKind::Prediction)
            .unwrap();
        let cfg = AttackConfig::default();
        assert!(matches!(run_attack(&model, &shared, &cfg, None, 2), Err(Error::Config(_))));
    }
}
