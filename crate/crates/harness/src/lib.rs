//! Reproducible Monte Carlo experiments for the Tsallis goodness-of-fit
//! tests: critical-value tables, Shapiro–Wilk normality sweeps, convergence
//! regressions, estimator consistency curves and distribution-shape data.
//!
//! An [`ExperimentConfig`] describes a grid of cells. Each cell runs `M`
//! independent replications on its own RNG streams, so the results are a
//! pure function of the configuration and the master seed, whatever the
//! worker count. Every CSV row carries its status (`ok` or `infeasible`),
//! the configuration hash and the toolkit version.

pub mod config;
mod error;
mod exec;
mod experiments;
pub mod output;
pub mod plan;

pub use config::{ExperimentConfig, ExperimentKind, GridBlock, Source};
pub use error::{HarnessError, Result};
pub use exec::write_atomic;
pub use experiments::{
    run_consistency_curves, run_convergence, run_critical_values, run_distribution_shape,
    run_experiment, run_normality_sweep, ConsistencyRow, ConvergenceResult, ConvergenceRow,
    CriticalRow, DensityGrid, NormalityRow, QqPoint, RegressionRow, RunOptions, RunSummary,
    ShapeCell, ShapeResult,
};
