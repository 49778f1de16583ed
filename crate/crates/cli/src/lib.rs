//! Configuration-driven experiment runner for `riesz-lab`.
//!
//! A run is described by an [`ExperimentConfig`], either read from a JSON
//! document or assembled from command-line flags, and produces a
//! [`ScanReport`]: a CSV table plus a JSON summary carrying the resolved
//! config and its hash.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use cli::{cli_parse, render};
pub use config::{ExperimentConfig, LambdaSpec, Task};
pub use error::CliError;
pub use report::{Cell, ScanReport};
pub use run::run;
