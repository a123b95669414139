use std::path::Path;

use thiserror::Error;
use wez_core::data::DataError;
use wez_core::doe::DoeError;
use wez_core::preprocess::PreprocessError;
use wez_core::sim::SimError;
use wez_core::surrogate::SurrogateError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Doe(#[from] DoeError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for usage errors, 1 for everything that went wrong at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn config(path: &Path, message: impl ToString) -> CliError {
        CliError::Config {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }
}
