//! Command-line layer of flowlab: experiment configuration, the
//! subcommands that write results to disk and the acceptance suite.

pub mod commands;
pub mod config;
pub mod plot;
pub mod verify;

pub use config::ExperimentConfig;
