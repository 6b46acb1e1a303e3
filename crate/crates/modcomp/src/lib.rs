//! Experiment runner, config schema, report writers and binary dumps for
//! the `modcomp` command-line tool.

pub mod config;
pub mod dump;
pub mod error;
pub mod registry;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::RunError;
pub use runner::{run, RunOutcome};
