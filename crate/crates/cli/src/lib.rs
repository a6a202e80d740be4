//! Config-driven experiment runner: builds systems, runs shadowing and
//! refutation experiments, and writes JSON reports, CSV tables and SVG plots.

use std::path::PathBuf;

pub mod config;
pub mod render;
pub mod run;
pub mod systems;

pub use config::{ExperimentConfig, ExperimentKind};
pub use run::{render_file, run_experiment, Artifacts};

pub const REPORT_SCHEMA: &str = "shadowlab-report/1";
pub const CODE_VERSION: &str = concat!("shadowlab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{context}: {source}")]
    Experiment {
        context: &'static str,
        #[source]
        source: shadowlab::Error,
    },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for config problems, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            _ => 1,
        }
    }
}

impl From<shadowlab::Error> for CliError {
    fn from(source: shadowlab::Error) -> Self {
        CliError::Experiment { context: "building the system", source }
    }
}

pub(crate) trait Context<T> {
    fn context(self, what: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for shadowlab::Result<T> {
    fn context(self, what: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Experiment { context: what, source })
    }
}
