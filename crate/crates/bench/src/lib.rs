//! Benchmark harness for the robust mean estimators: experiment configs,
//! parallel trial execution, error metrics and the `affmed` command line.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod metrics;
pub mod points;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, TrialRecord};
