//! Config-driven experiment runner for geometric gate simulations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use commands::{cmd_run, cmd_sweep, cmd_validate};
pub use config::ExperimentConfig;
pub use error::CliError;
