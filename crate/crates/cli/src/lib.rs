//! File formats, experiment orchestration and the command line for
//! `graphtomo-core`.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod formats;

pub use config::{ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, run_trial, summarize, TrialResult};
