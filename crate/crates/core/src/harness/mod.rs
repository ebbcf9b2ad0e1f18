//! Batch experiment harness: reference solutions, experiment configs, the
//! runners behind the `binet` CLI, and report emission.
//!
//! The flow is `ExperimentConfig` (JSON, strict schema) -> [`run_experiment`]
//! -> [`ResultBundle`] -> [`emit_report`] (summary.json plus CSV files). All
//! runs are deterministic given the config and seed; wall-clock times are the
//! only non-reproducible output and live in a single `timing` block.

pub mod config;
pub mod exact;
pub mod experiments;
pub mod fd;
pub mod report;

pub use config::{builtin_configs, validate, ConfigError, ExperimentConfig, TaskConfig};
pub use exact::{BoundaryData, ExactError, ExactSolution};
pub use experiments::{run_experiment, Outcome, RunError, RunMode, RunOptions};
pub use fd::{fd_reference_laplace, FdError, FdSolution};
pub use report::{emit_report, read_summary, ResultBundle, TrialResult};
