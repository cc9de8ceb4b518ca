//! Scenario runner for the Maslov index engine: JSON scenario files in,
//! per-route report rows and CSV out.

pub mod convergence;
pub mod output;
pub mod run;
pub mod scenario;

use thiserror::Error;

pub use convergence::{convergence_study, fitted_order, Order, Study};
pub use output::{emit_csv, read_csv, render, write_csv, CSV_HEADER};
pub use run::{run, run_scenario, CheckLine, Overrides, ReportRow, RunOutcome};
pub use scenario::{bundled, resolve, Scenario, ScenarioKind, BUNDLED};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{scenario}: {source}")]
    Numerical {
        scenario: String,
        #[source]
        source: maslov_core::MaslovError,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => EXIT_INPUT,
            CliError::Numerical { .. } => EXIT_NUMERICAL,
        }
    }
}
