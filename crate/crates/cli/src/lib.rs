//! Experiment driver: runs plans, computes metric tables and trajectory
//! networks from the stored logs, and tunes configurations.

pub mod analysis;
pub mod error;
pub mod plan;
pub mod run;
pub mod store;
pub mod tuning;

pub use analysis::{cmd_metrics, cmd_stn, delta_rows, AnalysisOptions, DeltaRow, MetricsRow};
pub use error::{CliError, CliResult};
pub use plan::{run_seed, ExperimentPlan};
pub use run::cmd_run;
pub use tuning::{cmd_ablate, cmd_tune, TuneOptions};

/// Text of the base configuration and its single-component variants.
pub fn cmd_variants() -> String {
    moead_core::tuner::variants_text(&moead_core::AlgoConfig::auto_moead())
}
