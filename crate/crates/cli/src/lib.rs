//! Command-line front end for fragment-based correlation energies: run
//! configuration, pipeline orchestration and report emission.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{validate_config, OutputFormat, RunConfig, Violation};
pub use pipeline::{apply_overrides, budget, load_config, run, CliError, Overrides};
pub use report::{ConvergenceReport, ConvergenceRow, RunReport};
