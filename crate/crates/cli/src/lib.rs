//! Configuration, dispatch and artifact output for the `fracsync` binary.

pub mod args;
pub mod config;
pub mod experiments;
pub mod runner;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use runner::{run, RunError, RunOutcome};
