//! Multilayer perceptron regressor for the maximum launch range: network,
//! backpropagation, Adam, early-stopped training, cross-validation and
//! model files.

mod metrics;
mod model;
mod network;
mod train;

pub use metrics::{regression_metrics, RegressionMetrics};
pub use model::{MlpModel, ModelMetadata, FORMAT_VERSION};
pub use network::{adam_step, AdamConfig, AdamState, Gradients, Mlp};
pub use train::{cross_validate, evaluate, train, CvReport, EpochRecord, FoldResult, TrainConfig, Trained};

use thiserror::Error;

use crate::preprocess::PreprocessError;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("expected {expected} columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize, history: Vec<EpochRecord> },
    #[error("no rows to work on")]
    EmptyRows,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("unsupported model format version {0:?}")]
    FormatVersionMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
}
