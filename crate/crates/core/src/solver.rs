//! Training loop: fit a network-represented layer density to boundary data.
//!
//! The unknown PDE solution is written as a layer potential with density
//! `h`, and `h` is the network's output on boundary nodes. The only loss is
//! the discretized boundary condition
//!
//! ```text
//! L = (1/n) sum_i | (A h)_i - g_i |^2
//! ```
//!
//! where `A` is the assembled boundary-trace operator (including the
//! half-density jump term for double layers) and `g` the Dirichlet data.
//! Nothing else is imposed: the layer-potential ansatz satisfies the PDE
//! identically, so fitting the boundary condition is fitting the solution.
//!
//! Complex densities use two network output channels `(Re h, Im h)` and the
//! block form of the complex operator; `|.|^2` then sums both channels.
//!
//! [`train`] handles a single operator; [`train_family`] handles operator
//! learning, where each epoch draws a batch of tasks (one boundary-value
//! problem each: operator, network inputs, data) and descends the mean of
//! their losses. Tasks can be resampled on a schedule, which is how the
//! triangle experiment sees fresh geometries during training.

use crate::geometry::QuadratureGrid;
use crate::network::{Network, NetworkGradients, Optimizer};
use crate::quadrature::OperatorMatrix;
use crate::SeedStream;
use nalgebra::DMatrix;
use std::fmt;

#[derive(Clone, Debug)]
pub enum SolveError {
    ShapeMismatch(String),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
        }
    }
}

impl std::error::Error for SolveError {}

/// Optimizer choice and loop controls for a training run.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub use_adam: bool,
    /// Record the loss every this many epochs (the last epoch is always
    /// recorded). Zero records only the last.
    pub record_every: usize,
    /// Abort when the loss exceeds this or turns non-finite.
    pub abort_loss: f64,
    /// Epochs at which to snapshot the network (0 = initialization).
    pub snapshot_epochs: Vec<usize>,
}

impl TrainConfig {
    pub fn adam(epochs: usize, learning_rate: f64) -> Self {
        TrainConfig {
            epochs,
            learning_rate,
            use_adam: true,
            record_every: 100,
            abort_loss: 1e6,
            snapshot_epochs: Vec::new(),
        }
    }

    pub fn gradient_descent(epochs: usize, learning_rate: f64) -> Self {
        TrainConfig {
            use_adam: false,
            ..TrainConfig::adam(epochs, learning_rate)
        }
    }

    fn optimizer(&self) -> Optimizer {
        if self.use_adam {
            Optimizer::adam(self.learning_rate)
        } else {
            Optimizer::sgd(self.learning_rate)
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    /// (epoch, loss before that epoch's update).
    pub loss_history: Vec<(usize, f64)>,
    /// Loss of the final parameters.
    pub final_loss: f64,
    pub epochs_run: usize,
    pub diverged: bool,
    /// (epoch, snapshot) pairs requested via `snapshot_epochs`.
    pub snapshots: Vec<(usize, Network)>,
}

/// One boundary-value problem inside an operator-learning family.
pub struct OperatorTask {
    pub op: OperatorMatrix,
    /// Network inputs, one row per boundary node (may carry extra columns
    /// such as a wavenumber or geometry parameters).
    pub inputs: DMatrix<f64>,
    pub target: DMatrix<f64>,
}

/// Controls for family training.
pub struct FamilyTrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub use_adam: bool,
    /// Tasks drawn per epoch (capped at the family size).
    pub batch_per_epoch: usize,
    /// Regenerate the task list every this many epochs (None keeps the
    /// initial list for the whole run).
    pub resample_every: Option<usize>,
    pub record_every: usize,
    pub abort_loss: f64,
}

fn check_task_shapes(
    net: &Network,
    op: &OperatorMatrix,
    inputs: &DMatrix<f64>,
    target: &DMatrix<f64>,
) -> Result<(), SolveError> {
    let channels = if op.is_complex() { 2 } else { 1 };
    if net.output_dim != channels {
        return Err(SolveError::ShapeMismatch(format!(
            "operator needs {channels} density channel(s) but the network outputs {}",
            net.output_dim
        )));
    }
    if inputs.nrows() != op.ncols() {
        return Err(SolveError::ShapeMismatch(format!(
            "operator has {} source nodes but {} input rows were given",
            op.ncols(),
            inputs.nrows()
        )));
    }
    if inputs.ncols() != net.input_dim {
        return Err(SolveError::ShapeMismatch(format!(
            "network takes {} input features but rows have {}",
            net.input_dim,
            inputs.ncols()
        )));
    }
    if target.nrows() != op.nrows() || target.ncols() != channels {
        return Err(SolveError::ShapeMismatch(format!(
            "data must be {} x {channels}, got {} x {}",
            op.nrows(),
            target.nrows(),
            target.ncols()
        )));
    }
    Ok(())
}

/// Mean squared boundary residual `(1/n) sum_i |(A h)_i - g_i|^2`.
pub fn boundary_loss(op: &OperatorMatrix, density: &DMatrix<f64>, target: &DMatrix<f64>) -> f64 {
    let r = op.apply_channels(density) - target;
    r.iter().map(|v| v * v).sum::<f64>() / r.nrows() as f64
}

fn accumulate(total: &mut Option<NetworkGradients>, grads: NetworkGradients, scale: f64) {
    match total {
        None => {
            let mut g = grads;
            for w in &mut g.d_weights {
                *w *= scale;
            }
            for b in g.d_biases.iter_mut().flatten() {
                *b *= scale;
            }
            *total = Some(g);
        }
        Some(t) => {
            for (tw, gw) in t.d_weights.iter_mut().zip(&grads.d_weights) {
                tw.zip_apply(gw, |ti, gi| *ti += scale * gi);
            }
            for (tb, gb) in t.d_biases.iter_mut().zip(&grads.d_biases) {
                if let (Some(tb), Some(gb)) = (tb.as_mut(), gb.as_ref()) {
                    tb.zip_apply(gb, |ti, gi| *ti += scale * gi);
                }
            }
        }
    }
}

/// Loss and gradient of one task at the current parameters.
fn task_pass(
    net: &Network,
    task_op: &OperatorMatrix,
    inputs: &DMatrix<f64>,
    target: &DMatrix<f64>,
) -> (f64, NetworkGradients) {
    let pass = net.forward(inputs);
    let r = task_op.apply_channels(&pass.output) - target;
    let m = r.nrows() as f64;
    let loss = r.iter().map(|v| v * v).sum::<f64>() / m;
    let upstream = task_op.apply_transpose_channels(&r) * (2.0 / m);
    let grads = net.backward(&pass, &upstream);
    (loss, grads)
}

/// Fit the network's boundary density to the data `target` through the
/// operator `op`. Network inputs are given explicitly (usually the boundary
/// nodes, one row each).
pub fn train(
    net: &mut Network,
    op: &OperatorMatrix,
    inputs: &DMatrix<f64>,
    target: &DMatrix<f64>,
    cfg: &TrainConfig,
) -> Result<TrainResult, SolveError> {
    check_task_shapes(net, op, inputs, target)?;
    let mut optimizer = cfg.optimizer();
    let mut history = Vec::new();
    let mut snapshots = Vec::new();
    let mut diverged = false;
    let mut epochs_run = 0;
    for epoch in 0..cfg.epochs {
        if cfg.snapshot_epochs.contains(&epoch) {
            snapshots.push((epoch, net.clone()));
        }
        let (loss, grads) = task_pass(net, op, inputs, target);
        if !loss.is_finite() || loss > cfg.abort_loss {
            diverged = true;
            history.push((epoch, loss));
            break;
        }
        if cfg.record_every > 0 && epoch % cfg.record_every == 0 {
            history.push((epoch, loss));
        }
        optimizer.step(net, &grads);
        epochs_run = epoch + 1;
    }
    if cfg.snapshot_epochs.contains(&cfg.epochs) && !diverged {
        snapshots.push((cfg.epochs, net.clone()));
    }
    let final_loss = boundary_loss(op, &net.predict(inputs), target);
    if history.last().map(|(e, _)| *e) != Some(epochs_run) {
        history.push((epochs_run, final_loss));
    }
    Ok(TrainResult {
        loss_history: history,
        final_loss,
        epochs_run,
        diverged,
        snapshots,
    })
}

/// Operator learning: train one network against a family of boundary-value
/// problems. `make_tasks` builds the task list (called once up front, and
/// again on the resampling schedule); each epoch samples `batch_per_epoch`
/// tasks without replacement and descends the mean of their losses.
pub fn train_family(
    net: &mut Network,
    make_tasks: &mut dyn FnMut(&mut SeedStream) -> Vec<OperatorTask>,
    cfg: &FamilyTrainConfig,
    rng: &mut SeedStream,
) -> Result<TrainResult, SolveError> {
    let mut tasks = make_tasks(rng);
    if tasks.is_empty() {
        return Err(SolveError::ShapeMismatch("task family is empty".into()));
    }
    for t in &tasks {
        check_task_shapes(net, &t.op, &t.inputs, &t.target)?;
    }
    let mut optimizer = if cfg.use_adam {
        Optimizer::adam(cfg.learning_rate)
    } else {
        Optimizer::sgd(cfg.learning_rate)
    };
    let mut history = Vec::new();
    let mut diverged = false;
    let mut epochs_run = 0;
    for epoch in 0..cfg.epochs {
        if let Some(every) = cfg.resample_every {
            if epoch > 0 && epoch % every == 0 {
                tasks = make_tasks(rng);
                for t in &tasks {
                    check_task_shapes(net, &t.op, &t.inputs, &t.target)?;
                }
            }
        }
        let batch = cfg.batch_per_epoch.min(tasks.len()).max(1);
        let chosen: Vec<usize> = sample_without_replacement(tasks.len(), batch, rng);
        let mut total: Option<NetworkGradients> = None;
        let mut mean_loss = 0.0;
        for &ti in &chosen {
            let t = &tasks[ti];
            let (loss, grads) = task_pass(net, &t.op, &t.inputs, &t.target);
            mean_loss += loss / batch as f64;
            accumulate(&mut total, grads, 1.0 / batch as f64);
        }
        if !mean_loss.is_finite() || mean_loss > cfg.abort_loss {
            diverged = true;
            history.push((epoch, mean_loss));
            break;
        }
        if cfg.record_every > 0 && epoch % cfg.record_every == 0 {
            history.push((epoch, mean_loss));
        }
        optimizer.step(net, total.as_ref().expect("non-empty batch"));
        epochs_run = epoch + 1;
    }
    // Final loss over the whole current family.
    let final_loss = tasks
        .iter()
        .map(|t| boundary_loss(&t.op, &net.predict(&t.inputs), &t.target))
        .sum::<f64>()
        / tasks.len() as f64;
    if history.last().map(|(e, _)| *e) != Some(epochs_run) {
        history.push((epochs_run, final_loss));
    }
    Ok(TrainResult {
        loss_history: history,
        final_loss,
        epochs_run,
        diverged,
        snapshots: Vec::new(),
    })
}

fn sample_without_replacement(n: usize, k: usize, rng: &mut SeedStream) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(n) {
        let i = rng.index(pool.len());
        out.push(pool.swap_remove(i));
    }
    out
}

/// Boundary nodes as network inputs, one row per node.
pub fn boundary_inputs(grid: &QuadratureGrid) -> DMatrix<f64> {
    DMatrix::from_fn(grid.len(), 2, |i, j| if j == 0 { grid.points[i].x } else { grid.points[i].y })
}

/// Relative L2 error `||a - b|| / ||b||` against the reference `b`.
pub fn relative_l2(approx: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(approx.len(), reference.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in approx.iter().zip(reference) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    (num / den).sqrt()
}

/// Relative L2 error for two-channel (complex) fields.
pub fn relative_l2_complex(
    approx_re: &[f64],
    approx_im: &[f64],
    ref_re: &[f64],
    ref_im: &[f64],
) -> f64 {
    assert_eq!(approx_re.len(), ref_re.len());
    assert_eq!(approx_im.len(), ref_im.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..approx_re.len() {
        let dr = approx_re[i] - ref_re[i];
        let di = approx_im[i] - ref_im[i];
        num += dr * dr + di * di;
        den += ref_re[i] * ref_re[i] + ref_im[i] * ref_im[i];
    }
    (num / den).sqrt()
}
