//! Experiment configuration, orchestration and output for `parrep-core`.

pub mod bounds;
pub mod config;
pub mod experiment;
pub mod lemmas;
pub mod props;

pub use config::{ExperimentConfig, ExperimentKind, LemmaSuite, ParamsConfig};
pub use experiment::{run_config, ExperimentResult, ReductionSetup, ReductionSummary, Summary};
