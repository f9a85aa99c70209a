//! Experiment orchestration, reports and file handling behind the `tncg` CLI.

pub mod experiment;
pub mod files;
pub mod report;

pub use experiment::{run_experiment, ExperimentConfig, Scenario};
pub use files::{validate_files, Diagnostic};
pub use report::{Fraction, Report, Row};
