//! Experiment configuration: a strict JSON schema, validation, and the
//! built-in experiment catalog shipped under `configs/`.
//!
//! Every config round-trips losslessly through serde (f64 values re-parse to
//! the identical bits) and unknown keys are rejected at every level.

use crate::geometry::{make_curve, CurveSpec};
use crate::harness::exact::{BoundaryData, ExactSolution};
use crate::kernels::PdeKind;
use crate::network::{Activation, Arch, Network, Parameterization};
use crate::quadrature::{KrOrder, PotentialKind, TraceSide};
use crate::SeedStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigError {
    Parse(String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// One experiment: identity, repeat protocol, and the task to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Identifier used for output naming; the shipped catalog ids are listed
    /// by `binet list-experiments`.
    pub experiment: String,
    /// One-line human description.
    pub description: String,
    /// Base seed; trial `t` runs with `seed + t`.
    pub seed: u64,
    /// Number of repeated trials (distinct seeds).
    pub trials: usize,
    pub task: TaskConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskConfig {
    /// Fit one boundary-value problem and compare against a reference field.
    Train(TrainTask),
    /// Train double- and single-layer variants of one Helmholtz problem with
    /// the same seed and compare their losses and errors.
    PotentialCompare(PotentialCompareTask),
    /// Learn the map from the Helmholtz wavenumber to the exterior solution.
    WavenumberOperator(WavenumberOperatorTask),
    /// Learn the map from triangle geometry to the interior Laplace solution.
    TriangleOperator(TriangleOperatorTask),
    /// Initialization-kernel deviation versus width.
    NtkWidthStudy(NtkWidthStudyTask),
    /// Training-kernel drift versus width.
    NtkDriftStudy(NtkDriftStudyTask),
    /// Quadrature identity table; no training.
    QuadratureSanity(QuadratureSanityTask),
}

/// PDE selector for configs (only the two assembly-supported kernels).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum PdeConfig {
    Laplace,
    Helmholtz { k: f64 },
}

impl PdeConfig {
    pub fn kind(&self) -> PdeKind {
        match *self {
            PdeConfig::Laplace => PdeKind::Laplace2D,
            PdeConfig::Helmholtz { k } => PdeKind::Helmholtz2D { k },
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, PdeConfig::Helmholtz { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub arch: Arch,
    pub activation: Activation,
    pub parameterization: Parameterization,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Adam,
    Sgd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub learning_rate: f64,
}

/// Epoch counts for the two run modes; `--faithful` selects the second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpochSchedule {
    pub scaled: usize,
    pub faithful: usize,
}

impl EpochSchedule {
    pub fn for_mode(&self, faithful: bool) -> usize {
        if faithful {
            self.faithful
        } else {
            self.scaled
        }
    }
}

/// Where the reference field for the error metric comes from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceConfig {
    /// The boundary data is the trace of a closed-form solution; compare
    /// against that solution.
    Exact,
    /// Compare against the five-point finite-difference solve on `[-1,1]^2`
    /// with `grid_n` intervals per axis.
    FiniteDifference { grid_n: usize },
}

/// Evaluation point set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalGridConfig {
    /// Uniform lattice over the curve's bounding box, keeping points on the
    /// problem side at distance greater than `band` from the boundary.
    Lattice { per_axis: usize, band: f64 },
    /// Lattice over `[-radius, radius]^2` keeping exterior points with
    /// `|p| < radius` at distance greater than `band` from the boundary.
    Annulus { per_axis: usize, band: f64, radius: f64 },
    /// Nodes of the finite-difference reference grid subsampled by `stride`,
    /// excluding nodes within `band` of the square's boundary.
    FdNodes { stride: usize, band: f64 },
}

/// Error thresholds. The faithful gate is enforced on `--faithful` runs; the
/// scaled entries apply to scaled runs when present (otherwise scaled runs
/// only report).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainGates {
    /// Bound on the median (over trials) relative L2 field error.
    pub faithful_rel_l2: f64,
    pub scaled_rel_l2: Option<f64>,
    /// Require the checkpoint-error sequence to decrease monotonically on
    /// scaled runs (the scaled fallback for runtime-capped experiments).
    pub scaled_monotone: bool,
}

/// Boundary-trace residual check around a corner point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerCheck {
    pub center: [f64; 2],
    pub radius: f64,
    /// Bound on the RMS of `|A h - g|` over boundary nodes within `radius`
    /// of `center` (enforced on faithful runs).
    pub max_rms_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainTask {
    pub pde: PdeConfig,
    pub curve: CurveSpec,
    pub nodes: usize,
    pub potential: PotentialKind,
    pub side: TraceSide,
    pub boundary_data: BoundaryData,
    /// Divide the training target by max |g| and rescale the density at
    /// evaluation (the potentials are linear in the density).
    pub normalize_target: bool,
    pub network: NetworkConfig,
    pub optimizer: OptimizerConfig,
    pub epochs: EpochSchedule,
    pub reference: ReferenceConfig,
    pub eval: EvalGridConfig,
    /// Fractions of the epoch budget at which the field error is also
    /// evaluated (for convergence reporting and the monotone gate).
    pub checkpoint_fractions: Vec<f64>,
    pub gates: TrainGates,
    pub corner_check: Option<CornerCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCompareTask {
    pub pde: PdeConfig,
    pub curve: CurveSpec,
    pub nodes: usize,
    pub side: TraceSide,
    pub boundary_data: BoundaryData,
    pub network: NetworkConfig,
    pub optimizer: OptimizerConfig,
    pub epochs: EpochSchedule,
    pub eval: EvalGridConfig,
    /// Epoch at which the two loss histories are compared (must be on the
    /// recording grid; used by the faithful gate).
    pub compare_epoch: usize,
    /// Faithful bound on relative L2 error with the double layer.
    pub double_rel_l2: f64,
    /// Faithful bound on relative L2 error with the single layer.
    pub single_rel_l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavenumberOperatorTask {
    pub curve: CurveSpec,
    pub nodes: usize,
    pub potential: PotentialKind,
    pub side: TraceSide,
    /// Disjoint closed training intervals for the wavenumber.
    pub bands: Vec<[f64; 2]>,
    /// Evenly spaced wavenumbers drawn per band (endpoints included); the
    /// per-k operators are assembled once and cached.
    pub samples_per_band: usize,
    /// Wavenumbers sampled per epoch from the training lattice.
    pub batch_per_epoch: usize,
    /// Center of the Hankel source supplying boundary data (must lie inside
    /// the curve).
    pub source_center: [f64; 2],
    pub network: NetworkConfig,
    pub optimizer: OptimizerConfig,
    pub epochs: EpochSchedule,
    /// Gated test sweep.
    pub test_wavenumbers: Vec<f64>,
    /// Reported but not gated (outside the training hull).
    pub extrapolation_wavenumbers: Vec<f64>,
    /// Wavenumber whose field grid goes into field.csv.
    pub field_wavenumber: f64,
    pub eval: EvalGridConfig,
    /// Faithful bound on the maximum relative L2 error over the gated sweep.
    pub faithful_rel_l2: f64,
    pub scaled_rel_l2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleOperatorTask {
    /// Nodes per sampled triangle (divisible by 3).
    pub nodes_per_triangle: usize,
    /// Triangles in the training pool.
    pub train_triangles: usize,
    /// Triangles drawn from the pool per epoch.
    pub batch_per_epoch: usize,
    /// Re-draw the pool every this many epochs.
    pub resample_every: usize,
    /// Vertex parameters a, b, c are drawn uniformly from
    /// `[param_min, param_max]`.
    pub param_min: f64,
    pub param_max: f64,
    pub network: NetworkConfig,
    pub optimizer: OptimizerConfig,
    pub epochs: EpochSchedule,
    pub test_triangles: usize,
    /// Per-triangle interior lattice resolution and exclusion band.
    pub eval_per_axis: usize,
    pub eval_band: f64,
    /// Faithful bound on the median relative L2 error over test triangles.
    pub faithful_median: f64,
    /// Faithful requirement that at least `fraction` of the test triangles
    /// have error at most `threshold`.
    pub fraction_threshold: f64,
    pub fraction_at_least: f64,
    pub scaled_median: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NtkWidthStudyTask {
    /// Boundary supplying the sample points (unit circle keeps inputs on the
    /// unit sphere, as the infinite-width limit requires).
    pub curve: CurveSpec,
    pub nodes: usize,
    pub potential: PotentialKind,
    pub side: TraceSide,
    pub hidden_layers: usize,
    pub widths: Vec<usize>,
    pub trials_per_width: usize,
    /// Also check that the smallest eigenvalue of the composed limit kernel
    /// is positive.
    pub check_lambda_min: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NtkDriftStudyTask {
    pub curve: CurveSpec,
    pub nodes: usize,
    pub potential: PotentialKind,
    pub side: TraceSide,
    pub hidden_layers: usize,
    /// Widths to train at; the drift gate compares the last width against
    /// the first.
    pub widths: Vec<usize>,
    pub boundary_data: BoundaryData,
    /// Plain gradient-descent learning rate.
    pub learning_rate: f64,
    /// Epochs at which the kernel is re-measured (strictly increasing,
    /// starting at 0).
    pub checkpoints: Vec<usize>,
    /// Gate: max drift at the widest width < ratio * max drift at the
    /// narrowest.
    pub drift_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSanityTask {
    pub nodes_smooth: usize,
    pub nodes_square: usize,
    pub nodes_triangle: usize,
    pub kr_order: KrOrder,
    pub tol_smooth: f64,
    pub tol_polygon: f64,
    pub tol_slp: f64,
    pub tol_jump: f64,
}

/// Schema-level validation; geometry and network constructors are dry-run so
/// `binet validate` surfaces their errors without training anything.
pub fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if cfg.experiment.is_empty()
        || !cfg.experiment.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
    {
        return Err(invalid("experiment id must be non-empty kebab-case ascii"));
    }
    if cfg.trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    match &cfg.task {
        TaskConfig::Train(t) => validate_train(t),
        TaskConfig::PotentialCompare(t) => validate_compare(t),
        TaskConfig::WavenumberOperator(t) => validate_wavenumber(t),
        TaskConfig::TriangleOperator(t) => validate_triangle(t),
        TaskConfig::NtkWidthStudy(t) => validate_ntk_width(t),
        TaskConfig::NtkDriftStudy(t) => validate_ntk_drift(t),
        TaskConfig::QuadratureSanity(t) => validate_quadrature(t),
    }
}

fn validate_curve_and_nodes(curve: &CurveSpec, nodes: usize) -> Result<(), ConfigError> {
    let geom = make_curve(curve).map_err(|e| invalid(e.to_string()))?;
    crate::geometry::discretize(&geom, nodes).map_err(|e| invalid(e.to_string()))?;
    Ok(())
}

fn validate_network(
    net: &NetworkConfig,
    input_dim: usize,
    output_dim: usize,
) -> Result<(), ConfigError> {
    let mut rng = SeedStream::new(0);
    Network::new(net.arch, net.activation, net.parameterization, input_dim, output_dim, &mut rng)
        .map_err(|e| invalid(e.to_string()))?;
    Ok(())
}

fn validate_optimizer(opt: &OptimizerConfig) -> Result<(), ConfigError> {
    if !(opt.learning_rate.is_finite() && opt.learning_rate > 0.0) {
        return Err(invalid("learning rate must be positive and finite"));
    }
    Ok(())
}

fn validate_epochs(e: &EpochSchedule) -> Result<(), ConfigError> {
    if e.scaled == 0 || e.faithful < e.scaled {
        return Err(invalid("epochs need scaled >= 1 and faithful >= scaled"));
    }
    Ok(())
}

fn validate_eval(eval: &EvalGridConfig, side: TraceSide) -> Result<(), ConfigError> {
    match *eval {
        EvalGridConfig::Lattice { per_axis, band } => {
            if per_axis < 8 {
                return Err(invalid("eval lattice needs at least 8 points per axis"));
            }
            if !(band.is_finite() && band >= 0.0) {
                return Err(invalid("eval band must be non-negative"));
            }
            if side == TraceSide::Exterior {
                return Err(invalid("exterior problems evaluate on an annulus"));
            }
        }
        EvalGridConfig::Annulus { per_axis, band, radius } => {
            if per_axis < 8 {
                return Err(invalid("eval lattice needs at least 8 points per axis"));
            }
            if !(band.is_finite() && band >= 0.0) || !(radius.is_finite() && radius > 0.0) {
                return Err(invalid("annulus needs a positive radius and non-negative band"));
            }
            if side == TraceSide::Interior {
                return Err(invalid("interior problems evaluate on an interior lattice"));
            }
        }
        EvalGridConfig::FdNodes { stride, band } => {
            if stride == 0 {
                return Err(invalid("fd-nodes stride must be at least 1"));
            }
            if !(band.is_finite() && band >= 0.0) {
                return Err(invalid("eval band must be non-negative"));
            }
            if side == TraceSide::Exterior {
                return Err(invalid("fd-nodes evaluation is interior-only"));
            }
        }
    }
    Ok(())
}

/// Wavenumber consistency between the PDE and complex boundary data.
fn validate_data_matches_pde(pde: &PdeConfig, data: &BoundaryData) -> Result<(), ConfigError> {
    let data_complex = data.is_complex();
    if pde.is_complex() != data_complex {
        return Err(invalid(if data_complex {
            "complex boundary data needs a helmholtz pde"
        } else {
            "helmholtz problems need complex boundary data"
        }));
    }
    if let (PdeConfig::Helmholtz { k }, BoundaryData::Exact(s)) = (pde, data) {
        if let Some(dk) = s.wavenumber() {
            if (dk - k).abs() > 1e-12 {
                return Err(invalid(format!(
                    "boundary data wavenumber {dk} does not match the pde wavenumber {k}"
                )));
            }
        }
    }
    Ok(())
}

fn validate_train(t: &TrainTask) -> Result<(), ConfigError> {
    validate_curve_and_nodes(&t.curve, t.nodes)?;
    let channels = if t.pde.is_complex() { 2 } else { 1 };
    validate_network(&t.network, 2, channels)?;
    validate_optimizer(&t.optimizer)?;
    validate_epochs(&t.epochs)?;
    validate_eval(&t.eval, t.side)?;
    validate_data_matches_pde(&t.pde, &t.boundary_data)?;
    if t.pde.is_complex() && !matches!(t.curve, CurveSpec::Circle { .. } | CurveSpec::Star) {
        return Err(invalid("helmholtz assembly needs a smooth curve"));
    }
    if !t.checkpoint_fractions.iter().all(|f| (0.0..1.0).contains(f) && *f > 0.0) {
        return Err(invalid("checkpoint fractions must lie strictly between 0 and 1"));
    }
    if !(t.gates.faithful_rel_l2.is_finite() && t.gates.faithful_rel_l2 > 0.0) {
        return Err(invalid("the faithful error gate must be positive"));
    }
    if t.gates.scaled_monotone && t.checkpoint_fractions.is_empty() {
        return Err(invalid("the monotone gate needs checkpoint fractions"));
    }
    match t.reference {
        ReferenceConfig::Exact => {
            if !matches!(t.boundary_data, BoundaryData::Exact(_)) {
                return Err(invalid("an exact reference needs closed-form boundary data"));
            }
            if matches!(t.eval, EvalGridConfig::FdNodes { .. }) {
                return Err(invalid("fd-nodes evaluation needs a finite-difference reference"));
            }
            if let BoundaryData::Exact(ExactSolution::HankelSource { center, .. }) =
                t.boundary_data
            {
                let geom = make_curve(&t.curve).map_err(|e| invalid(e.to_string()))?;
                let inside = geom.contains(crate::geometry::Point2::new(center[0], center[1]));
                match t.side {
                    TraceSide::Exterior if !inside => {
                        return Err(invalid("the source must sit inside the obstacle"))
                    }
                    TraceSide::Interior if inside => {
                        return Err(invalid("the source must sit outside the domain"))
                    }
                    _ => {}
                }
            }
        }
        ReferenceConfig::FiniteDifference { grid_n } => {
            if t.curve != (CurveSpec::Square { side: 2.0 }) {
                return Err(invalid("the finite-difference reference runs on the side-2 square"));
            }
            if t.pde.is_complex() {
                return Err(invalid("the finite-difference reference solves the laplace equation"));
            }
            if grid_n < 64 {
                return Err(invalid("the finite-difference reference needs grid_n >= 64"));
            }
            match t.eval {
                EvalGridConfig::FdNodes { stride, .. } => {
                    if grid_n % stride != 0 {
                        return Err(invalid("the fd-nodes stride must divide grid_n"));
                    }
                }
                _ => return Err(invalid("a finite-difference reference needs fd-nodes evaluation")),
            }
        }
    }
    if let Some(c) = &t.corner_check {
        if !(c.radius > 0.0 && c.max_rms_residual > 0.0) {
            return Err(invalid("the corner check needs a positive radius and bound"));
        }
    }
    Ok(())
}

fn validate_compare(t: &PotentialCompareTask) -> Result<(), ConfigError> {
    validate_curve_and_nodes(&t.curve, t.nodes)?;
    if !t.pde.is_complex() {
        return Err(invalid("the potential comparison is a helmholtz experiment"));
    }
    if !matches!(t.curve, CurveSpec::Circle { .. } | CurveSpec::Star) {
        return Err(invalid("helmholtz assembly needs a smooth curve"));
    }
    validate_network(&t.network, 2, 2)?;
    validate_optimizer(&t.optimizer)?;
    validate_epochs(&t.epochs)?;
    validate_eval(&t.eval, t.side)?;
    validate_data_matches_pde(&t.pde, &t.boundary_data)?;
    if t.compare_epoch == 0 || t.compare_epoch % 100 != 0 || t.compare_epoch >= t.epochs.faithful {
        return Err(invalid(
            "compare_epoch must be a positive multiple of 100 below the faithful epoch count",
        ));
    }
    if !(t.double_rel_l2 > 0.0 && t.single_rel_l2 > 0.0) {
        return Err(invalid("error gates must be positive"));
    }
    Ok(())
}

fn validate_wavenumber(t: &WavenumberOperatorTask) -> Result<(), ConfigError> {
    validate_curve_and_nodes(&t.curve, t.nodes)?;
    if !matches!(t.curve, CurveSpec::Circle { .. } | CurveSpec::Star) {
        return Err(invalid("helmholtz assembly needs a smooth curve"));
    }
    validate_network(&t.network, 3, 2)?;
    validate_optimizer(&t.optimizer)?;
    validate_epochs(&t.epochs)?;
    validate_eval(&t.eval, t.side)?;
    if t.bands.is_empty()
        || t.bands.iter().any(|b| !(b[0] > 0.0 && b[1] > b[0]))
        || t.bands.windows(2).any(|w| w[0][1] >= w[1][0])
    {
        return Err(invalid("bands must be ordered disjoint intervals of positive wavenumbers"));
    }
    if t.samples_per_band < 2 {
        return Err(invalid("need at least 2 wavenumber samples per band"));
    }
    if t.batch_per_epoch == 0 {
        return Err(invalid("batch_per_epoch must be at least 1"));
    }
    if t.test_wavenumbers.is_empty() || t.test_wavenumbers.iter().any(|k| *k <= 0.0) {
        return Err(invalid("test wavenumbers must be positive and non-empty"));
    }
    if !t.test_wavenumbers.contains(&t.field_wavenumber) {
        return Err(invalid("the field wavenumber must be one of the test wavenumbers"));
    }
    let geom = make_curve(&t.curve).map_err(|e| invalid(e.to_string()))?;
    if !geom.contains(crate::geometry::Point2::new(t.source_center[0], t.source_center[1])) {
        return Err(invalid("the source center must sit inside the curve"));
    }
    if t.side != TraceSide::Exterior {
        return Err(invalid("the wavenumber operator is an exterior problem"));
    }
    if !(t.faithful_rel_l2 > 0.0) {
        return Err(invalid("the faithful error gate must be positive"));
    }
    Ok(())
}

fn validate_triangle(t: &TriangleOperatorTask) -> Result<(), ConfigError> {
    if t.nodes_per_triangle % 3 != 0 || t.nodes_per_triangle < 30 {
        return Err(invalid("nodes_per_triangle must be a multiple of 3, at least 30"));
    }
    if t.train_triangles == 0 || t.test_triangles == 0 || t.batch_per_epoch == 0 {
        return Err(invalid("triangle counts and batch size must be positive"));
    }
    if t.resample_every == 0 {
        return Err(invalid("resample_every must be at least 1"));
    }
    if !(t.param_min > 0.0 && t.param_min < t.param_max && t.param_max <= 1.0) {
        return Err(invalid("need 0 < param_min < param_max <= 1"));
    }
    validate_network(&t.network, 5, 1)?;
    validate_optimizer(&t.optimizer)?;
    validate_epochs(&t.epochs)?;
    if t.eval_per_axis < 8 || !(t.eval_band >= 0.0) {
        return Err(invalid("triangle evaluation needs per_axis >= 8 and a non-negative band"));
    }
    if !(t.faithful_median > 0.0 && t.fraction_threshold > 0.0) {
        return Err(invalid("error gates must be positive"));
    }
    if !(0.0..=1.0).contains(&t.fraction_at_least) {
        return Err(invalid("fraction_at_least must lie in [0, 1]"));
    }
    Ok(())
}

fn validate_unit_circle(curve: &CurveSpec) -> Result<(), ConfigError> {
    match curve {
        CurveSpec::Circle { radius } if (*radius - 1.0).abs() < 1e-12 => Ok(()),
        _ => Err(invalid("the kernel studies sample the unit circle (unit-norm inputs)")),
    }
}

fn validate_ntk_width(t: &NtkWidthStudyTask) -> Result<(), ConfigError> {
    validate_unit_circle(&t.curve)?;
    validate_curve_and_nodes(&t.curve, t.nodes)?;
    if t.widths.is_empty() || t.widths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("widths must be strictly increasing and non-empty"));
    }
    if t.trials_per_width == 0 {
        return Err(invalid("trials_per_width must be at least 1"));
    }
    Ok(())
}

fn validate_ntk_drift(t: &NtkDriftStudyTask) -> Result<(), ConfigError> {
    validate_unit_circle(&t.curve)?;
    validate_curve_and_nodes(&t.curve, t.nodes)?;
    if t.widths.len() < 2 || t.widths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("the drift study needs at least two increasing widths"));
    }
    if t.boundary_data.is_complex() {
        return Err(invalid("the drift study trains a real target"));
    }
    if !(t.learning_rate.is_finite() && t.learning_rate > 0.0) {
        return Err(invalid("learning rate must be positive and finite"));
    }
    if t.checkpoints.first() != Some(&0) || t.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("checkpoints must start at 0 and increase strictly"));
    }
    if !(t.drift_ratio > 0.0) {
        return Err(invalid("drift_ratio must be positive"));
    }
    Ok(())
}

fn validate_quadrature(t: &QuadratureSanityTask) -> Result<(), ConfigError> {
    if t.nodes_smooth < 64 {
        return Err(invalid("the smooth identities need at least 64 nodes"));
    }
    if t.nodes_square % 4 != 0 || t.nodes_triangle % 3 != 0 {
        return Err(invalid("polygon node counts must divide evenly among the edges"));
    }
    for tol in [t.tol_smooth, t.tol_polygon, t.tol_slp, t.tol_jump] {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid("tolerances must be positive and finite"));
        }
    }
    Ok(())
}

fn resnet(blocks: usize, width: usize) -> NetworkConfig {
    NetworkConfig {
        arch: Arch::ResNet { blocks, width },
        activation: Activation::Relu,
        parameterization: Parameterization::Standard,
    }
}

fn mlp(hidden_layers: usize, width: usize, activation: Activation) -> NetworkConfig {
    NetworkConfig {
        arch: Arch::Mlp { hidden_layers, width },
        activation,
        parameterization: Parameterization::Standard,
    }
}

fn adam(learning_rate: f64) -> OptimizerConfig {
    OptimizerConfig { algorithm: Algorithm::Adam, learning_rate }
}

/// The shipped experiment catalog; `configs/<experiment>.json` mirrors this
/// list verbatim (a test keeps them in sync).
pub fn builtin_configs() -> Vec<ExperimentConfig> {
    let square = CurveSpec::Square { side: 2.0 };
    let mut catalog = Vec::new();

    catalog.push(ExperimentConfig {
        experiment: "laplace-smooth-a4".into(),
        description: "Interior Laplace on the square, boundary data exp(4x) sin(4y), \
                      double layer, 5 seeds."
            .into(),
        seed: 101,
        trials: 5,
        task: TaskConfig::Train(TrainTask {
            pde: PdeConfig::Laplace,
            curve: square,
            nodes: 800,
            potential: PotentialKind::Double,
            side: TraceSide::Interior,
            boundary_data: BoundaryData::Exact(ExactSolution::HarmonicExpSin { a: 4.0 }),
            normalize_target: true,
            network: resnet(6, 40),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
            reference: ReferenceConfig::Exact,
            eval: EvalGridConfig::Lattice { per_axis: 64, band: 0.03 },
            checkpoint_fractions: vec![],
            gates: TrainGates {
                faithful_rel_l2: 1e-2,
                scaled_rel_l2: None,
                scaled_monotone: false,
            },
            corner_check: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "laplace-smooth-a8".into(),
        description: "Interior Laplace on the square, boundary data exp(8x) sin(8y), \
                      2000 nodes and a wider residual net."
            .into(),
        seed: 102,
        trials: 1,
        task: TaskConfig::Train(TrainTask {
            pde: PdeConfig::Laplace,
            curve: square,
            nodes: 2000,
            potential: PotentialKind::Double,
            side: TraceSide::Interior,
            boundary_data: BoundaryData::Exact(ExactSolution::HarmonicExpSin { a: 8.0 }),
            normalize_target: true,
            network: resnet(6, 100),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
            reference: ReferenceConfig::Exact,
            eval: EvalGridConfig::Lattice { per_axis: 64, band: 0.02 },
            checkpoint_fractions: vec![],
            gates: TrainGates {
                faithful_rel_l2: 2e-3,
                scaled_rel_l2: None,
                scaled_monotone: false,
            },
            corner_check: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "laplace-nonsmooth".into(),
        description: "Interior Laplace on the square with the non-smooth boundary data \
                      2 - |x| - |y|, compared against the finite-difference reference."
            .into(),
        seed: 103,
        trials: 1,
        task: TaskConfig::Train(TrainTask {
            pde: PdeConfig::Laplace,
            curve: square,
            nodes: 800,
            potential: PotentialKind::Double,
            side: TraceSide::Interior,
            boundary_data: BoundaryData::CornerRidge,
            normalize_target: false,
            network: resnet(6, 40),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
            reference: ReferenceConfig::FiniteDifference { grid_n: 512 },
            eval: EvalGridConfig::FdNodes { stride: 8, band: 0.03 },
            checkpoint_fractions: vec![],
            gates: TrainGates {
                faithful_rel_l2: 2e-2,
                scaled_rel_l2: None,
                scaled_monotone: false,
            },
            corner_check: Some(CornerCheck {
                center: [0.0, 1.0],
                radius: 0.2,
                max_rms_residual: 5e-3,
            }),
        }),
    });

    for (name, k, seed) in [("helmholtz-star-k1", 1.0, 104), ("helmholtz-star-k4", 4.0, 105)] {
        catalog.push(ExperimentConfig {
            experiment: name.into(),
            description: format!(
                "Interior Helmholtz (k = {k}) on the five-petal star with plane-wave \
                 boundary data, double layer."
            ),
            seed,
            trials: 1,
            task: TaskConfig::Train(TrainTask {
                pde: PdeConfig::Helmholtz { k },
                curve: CurveSpec::Star,
                nodes: 800,
                potential: PotentialKind::Double,
                side: TraceSide::Interior,
                boundary_data: BoundaryData::Exact(ExactSolution::PlaneWave {
                    k,
                    angle: PI / 7.0,
                }),
                normalize_target: false,
                network: mlp(4, 40, Activation::Sigmoid),
                optimizer: adam(1e-3),
                epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
                reference: ReferenceConfig::Exact,
                eval: EvalGridConfig::Lattice { per_axis: 64, band: 0.016 },
                checkpoint_fractions: vec![],
                gates: TrainGates {
                    faithful_rel_l2: 2e-2,
                    scaled_rel_l2: None,
                    scaled_monotone: false,
                },
                corner_check: None,
            }),
        });
    }

    catalog.push(ExperimentConfig {
        experiment: "slp-vs-dlp-k4".into(),
        description: "Single versus double layer on the interior Helmholtz star problem \
                      (k = 4): same seed, paired losses and errors."
            .into(),
        seed: 106,
        trials: 1,
        task: TaskConfig::PotentialCompare(PotentialCompareTask {
            pde: PdeConfig::Helmholtz { k: 4.0 },
            curve: CurveSpec::Star,
            nodes: 600,
            side: TraceSide::Interior,
            boundary_data: BoundaryData::Exact(ExactSolution::PlaneWave {
                k: 4.0,
                angle: PI / 7.0,
            }),
            network: mlp(4, 40, Activation::Sigmoid),
            optimizer: adam(1e-4),
            epochs: EpochSchedule { scaled: 4000, faithful: 40000 },
            eval: EvalGridConfig::Lattice { per_axis: 64, band: 0.016 },
            compare_epoch: 10000,
            double_rel_l2: 8e-3,
            single_rel_l2: 4e-2,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "laplace-exterior".into(),
        description: "Exterior Laplace outside the star with boundary data x/(x^2+y^2), \
                      double layer, evaluated on the surrounding annulus."
            .into(),
        seed: 107,
        trials: 1,
        task: TaskConfig::Train(TrainTask {
            pde: PdeConfig::Laplace,
            curve: CurveSpec::Star,
            nodes: 600,
            potential: PotentialKind::Double,
            side: TraceSide::Exterior,
            boundary_data: BoundaryData::Exact(ExactSolution::InverseSquareX),
            normalize_target: false,
            network: resnet(6, 40),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
            reference: ReferenceConfig::Exact,
            eval: EvalGridConfig::Annulus { per_axis: 81, band: 0.016, radius: 1.6 },
            checkpoint_fractions: vec![],
            gates: TrainGates {
                faithful_rel_l2: 1e-2,
                scaled_rel_l2: None,
                scaled_monotone: false,
            },
            corner_check: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "helmholtz-k10-interior".into(),
        description: "Interior Helmholtz at k = 10 on the star with plane-wave data; \
                      the high-wavenumber interior case."
            .into(),
        seed: 108,
        trials: 1,
        task: TaskConfig::Train(TrainTask {
            pde: PdeConfig::Helmholtz { k: 10.0 },
            curve: CurveSpec::Star,
            nodes: 800,
            potential: PotentialKind::Double,
            side: TraceSide::Interior,
            boundary_data: BoundaryData::Exact(ExactSolution::PlaneWave {
                k: 10.0,
                angle: PI / 5.0,
            }),
            normalize_target: false,
            network: mlp(4, 80, Activation::Tanh),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
            reference: ReferenceConfig::Exact,
            eval: EvalGridConfig::Lattice { per_axis: 64, band: 0.012 },
            checkpoint_fractions: vec![0.25, 0.5, 0.75],
            gates: TrainGates {
                faithful_rel_l2: 4e-2,
                scaled_rel_l2: Some(1e-1),
                scaled_monotone: true,
            },
            corner_check: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "helmholtz-k8-exterior".into(),
        description: "Exterior Helmholtz at k = 8 outside the unit circle, driven by a \
                      point source inside; the high-wavenumber exterior case."
            .into(),
        seed: 109,
        trials: 1,
        task: TaskConfig::Train(TrainTask {
            pde: PdeConfig::Helmholtz { k: 8.0 },
            curve: CurveSpec::Circle { radius: 1.0 },
            nodes: 800,
            potential: PotentialKind::Double,
            side: TraceSide::Exterior,
            boundary_data: BoundaryData::Exact(ExactSolution::HankelSource {
                k: 8.0,
                center: [0.5, 0.0],
            }),
            normalize_target: false,
            network: mlp(4, 80, Activation::Tanh),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 2000, faithful: 20000 },
            reference: ReferenceConfig::Exact,
            eval: EvalGridConfig::Annulus { per_axis: 81, band: 0.024, radius: 1.6 },
            checkpoint_fractions: vec![0.25, 0.5, 0.75],
            gates: TrainGates {
                faithful_rel_l2: 6e-2,
                scaled_rel_l2: Some(1e-1),
                scaled_monotone: true,
            },
            corner_check: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "k-operator".into(),
        description: "Wavenumber-to-solution operator: exterior Helmholtz outside the \
                      star, trained on two wavenumber bands, tested across the gap."
            .into(),
        seed: 110,
        trials: 1,
        task: TaskConfig::WavenumberOperator(WavenumberOperatorTask {
            curve: CurveSpec::Star,
            nodes: 600,
            potential: PotentialKind::Double,
            side: TraceSide::Exterior,
            bands: vec![[2.0, 3.5], [4.5, 6.0]],
            samples_per_band: 24,
            batch_per_epoch: 16,
            source_center: [0.0, 0.0],
            network: mlp(4, 64, Activation::Tanh),
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 1000, faithful: 5000 },
            test_wavenumbers: vec![2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0],
            extrapolation_wavenumbers: vec![6.2],
            field_wavenumber: 4.0,
            eval: EvalGridConfig::Annulus { per_axis: 61, band: 0.016, radius: 1.6 },
            faithful_rel_l2: 5e-2,
            scaled_rel_l2: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "triangle-operator".into(),
        description: "Geometry-to-solution operator: interior Laplace on random \
                      triangles, single layer, resampled training pool."
            .into(),
        seed: 111,
        trials: 1,
        task: TaskConfig::TriangleOperator(TriangleOperatorTask {
            nodes_per_triangle: 240,
            train_triangles: 80,
            batch_per_epoch: 40,
            resample_every: 500,
            param_min: 0.05,
            param_max: 1.0,
            network: NetworkConfig {
                arch: Arch::ResNet { blocks: 4, width: 64 },
                activation: Activation::Relu,
                parameterization: Parameterization::Standard,
            },
            optimizer: adam(1e-3),
            epochs: EpochSchedule { scaled: 1000, faithful: 5000 },
            test_triangles: 100,
            eval_per_axis: 36,
            eval_band: 0.02,
            faithful_median: 2e-2,
            fraction_threshold: 1e-2,
            fraction_at_least: 0.40,
            scaled_median: None,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "ntk-width-study".into(),
        description: "Distance between the initialization kernel and its infinite-width \
                      limit as the width grows."
            .into(),
        seed: 112,
        trials: 1,
        task: TaskConfig::NtkWidthStudy(NtkWidthStudyTask {
            curve: CurveSpec::Circle { radius: 1.0 },
            nodes: 64,
            potential: PotentialKind::Double,
            side: TraceSide::Interior,
            hidden_layers: 2,
            widths: vec![64, 256, 1024],
            trials_per_width: 5,
            check_lambda_min: true,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "ntk-drift-study".into(),
        description: "Kernel drift during gradient descent at two widths; wide nets \
                      should drift less."
            .into(),
        seed: 113,
        trials: 1,
        task: TaskConfig::NtkDriftStudy(NtkDriftStudyTask {
            curve: CurveSpec::Circle { radius: 1.0 },
            nodes: 32,
            potential: PotentialKind::Double,
            side: TraceSide::Interior,
            hidden_layers: 2,
            widths: vec![64, 1024],
            boundary_data: BoundaryData::Exact(ExactSolution::HarmonicExpSin { a: 1.0 }),
            learning_rate: 5e-3,
            checkpoints: vec![0, 10, 100, 1000],
            drift_ratio: 0.5,
        }),
    });

    catalog.push(ExperimentConfig {
        experiment: "quadrature-sanity".into(),
        description: "Quadrature identity table: interior/boundary/exterior constants, \
                      the single-layer circle value, and the jump relation."
            .into(),
        seed: 114,
        trials: 1,
        task: TaskConfig::QuadratureSanity(QuadratureSanityTask {
            nodes_smooth: 256,
            nodes_square: 256,
            nodes_triangle: 255,
            kr_order: KrOrder::Six,
            tol_smooth: 1e-8,
            tol_polygon: 1e-6,
            tol_slp: 1e-6,
            tol_jump: 1e-3,
        }),
    });

    catalog
}

/// Look up a shipped experiment by id.
pub fn builtin(id: &str) -> Option<ExperimentConfig> {
    builtin_configs().into_iter().find(|c| c.experiment == id)
}

/// Parse and validate a config from JSON text.
pub fn from_json(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn to_json(cfg: &ExperimentConfig) -> String {
    let mut text = serde_json::to_string_pretty(cfg).expect("configs always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_validates() {
        let catalog = builtin_configs();
        assert_eq!(catalog.len(), 14);
        for cfg in &catalog {
            validate(cfg).unwrap_or_else(|e| panic!("{}: {e}", cfg.experiment));
        }
    }

    #[test]
    fn builtin_ids_are_unique_and_cover_the_catalog() {
        let catalog = builtin_configs();
        let mut ids: Vec<&str> = catalog.iter().map(|c| c.experiment.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), catalog.len());
        for required in [
            "laplace-smooth-a4",
            "laplace-smooth-a8",
            "laplace-nonsmooth",
            "helmholtz-star-k1",
            "helmholtz-star-k4",
            "slp-vs-dlp-k4",
            "laplace-exterior",
            "helmholtz-k10-interior",
            "helmholtz-k8-exterior",
            "k-operator",
            "triangle-operator",
            "ntk-width-study",
            "ntk-drift-study",
            "quadrature-sanity",
        ] {
            assert!(builtin(required).is_some(), "missing {required}");
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        for cfg in builtin_configs() {
            let text = to_json(&cfg);
            let back = from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", cfg.experiment));
            assert_eq!(back, cfg, "{}", cfg.experiment);
            // And the serialized form is stable under a second round trip.
            assert_eq!(to_json(&back), text);
        }
    }

    #[test]
    fn unknown_keys_are_rejected_at_every_level() {
        let base = to_json(&builtin("laplace-smooth-a4").unwrap());
        let top = base.replace("\"seed\"", "\"surprise\": 1, \"seed\"");
        assert!(matches!(from_json(&top), Err(ConfigError::Parse(_))));
        let nested = base.replace("\"nodes\"", "\"surprise\": 1, \"nodes\"");
        assert!(matches!(from_json(&nested), Err(ConfigError::Parse(_))));
        let gates = base.replace("\"faithful_rel_l2\"", "\"surprise\": 1, \"faithful_rel_l2\"");
        assert!(matches!(from_json(&gates), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn validation_rejects_inconsistent_problems() {
        // Complex data on a Laplace problem.
        let mut cfg = builtin("laplace-smooth-a4").unwrap();
        if let TaskConfig::Train(t) = &mut cfg.task {
            t.boundary_data =
                BoundaryData::Exact(ExactSolution::PlaneWave { k: 4.0, angle: 0.1 });
        }
        assert!(validate(&cfg).is_err());

        // Data wavenumber disagreeing with the PDE.
        let mut cfg = builtin("helmholtz-star-k4").unwrap();
        if let TaskConfig::Train(t) = &mut cfg.task {
            t.boundary_data = BoundaryData::Exact(ExactSolution::PlaneWave { k: 5.0, angle: 0.1 });
        }
        assert!(validate(&cfg).is_err());

        // Interior problem with an annulus grid.
        let mut cfg = builtin("laplace-smooth-a4").unwrap();
        if let TaskConfig::Train(t) = &mut cfg.task {
            t.eval = EvalGridConfig::Annulus { per_axis: 32, band: 0.01, radius: 1.6 };
        }
        assert!(validate(&cfg).is_err());

        // Helmholtz on a polygon.
        let mut cfg = builtin("helmholtz-star-k4").unwrap();
        if let TaskConfig::Train(t) = &mut cfg.task {
            t.curve = CurveSpec::Square { side: 2.0 };
        }
        assert!(validate(&cfg).is_err());

        // Scaled-parameterization residual net (unsupported combination).
        let mut cfg = builtin("laplace-smooth-a4").unwrap();
        if let TaskConfig::Train(t) = &mut cfg.task {
            t.network.parameterization = Parameterization::Ntk;
        }
        assert!(validate(&cfg).is_err());

        // Hankel source on the wrong side of the obstacle.
        let mut cfg = builtin("helmholtz-k8-exterior").unwrap();
        if let TaskConfig::Train(t) = &mut cfg.task {
            t.boundary_data =
                BoundaryData::Exact(ExactSolution::HankelSource { k: 8.0, center: [1.5, 0.0] });
        }
        assert!(validate(&cfg).is_err());

        // Zero trials.
        let mut cfg = builtin("laplace-smooth-a4").unwrap();
        cfg.trials = 0;
        assert!(validate(&cfg).is_err());

        // Compare epoch off the recording grid.
        let mut cfg = builtin("slp-vs-dlp-k4").unwrap();
        if let TaskConfig::PotentialCompare(t) = &mut cfg.task {
            t.compare_epoch = 10050;
        }
        assert!(validate(&cfg).is_err());

        // Drift checkpoints not anchored at zero.
        let mut cfg = builtin("ntk-drift-study").unwrap();
        if let TaskConfig::NtkDriftStudy(t) = &mut cfg.task {
            t.checkpoints = vec![10, 100];
        }
        assert!(validate(&cfg).is_err());
    }

    #[test]
    fn float_fields_survive_serialization_bit_exactly {
    }
}
