//! Experiment runner for the `fracctl` toolkit: TOML configuration, the
//! `validate`, `simulate`, `gramian` and `sweep` commands, and their CSV and
//! JSON outputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
