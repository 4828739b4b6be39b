//! Command-line front end: reads point sets, measures and experiment
//! configurations, runs the library operations and renders the results as
//! CSV, JSON and SVG artifacts carrying a provenance record.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod provenance;
pub mod svg;
pub mod table;

pub use commands::{execute, run, Artifact, Cli, Command, Format, Outcome};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
