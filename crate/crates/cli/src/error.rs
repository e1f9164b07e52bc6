use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ngfilter::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Per-run tally of inputs that could not be processed.
#[derive(Debug, Default, Clone, Copy)]
pub struct Outcome {
    pub failures: usize,
}
