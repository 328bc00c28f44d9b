//! Instance files, generators, independent checkers and the experiment runner.

pub mod experiment;
pub mod generate;
pub mod io;
pub mod verify;

use thiserror::Error;

pub use experiment::{
    gap_bound, run_experiment, run_experiment_on, run_seed, Command, ExperimentConfig,
    GeneratorSpec, Report, RunPayload, RunRecord, VerdictLine,
};
pub use generate::{generate_instance, SizeDistribution, POSITION_EPS};
pub use io::{load_instance, parse_instance, write_instance, InstanceFile, LoadedInstance};
pub use verify::{verify_cover, verify_solution, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
}

impl From<crate::error::InputError> for HarnessError {
    fn from(e: crate::error::InputError) -> Self {
        Self::Validation(e.to_string())
    }
}
