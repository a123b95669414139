use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{Mlp, SurrogateError};
use crate::preprocess::{encode, FeatureCodec, ScalerParams, N_FEATURES};
use crate::sim::Scenario;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub seed: u64,
    pub epochs_run: usize,
    /// 0-based epoch whose parameters were kept.
    pub best_epoch: usize,
    /// Scaled-target MSE on the training rows at the best epoch.
    pub train_mse: f64,
    /// Scaled-target MSE on the validation rows at the best epoch.
    pub validation_mse: f64,
    pub training_rows: usize,
    pub validation_rows: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub init: String,
    /// Hyperparameters left at their built-in defaults rather than set explicitly.
    pub defaults_used: Vec<String>,
}

/// Trained surrogate: network plus the encoding and scaling it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub net: Mlp,
    pub codec: FeatureCodec,
    pub scaler: ScalerParams,
    pub metadata: ModelMetadata,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: String,
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    scaler: ScalerParams,
    feature_order: FeatureCodec,
    metadata: ModelMetadata,
}

impl MlpModel {
    /// Predicted maximum launch range (NM).
    pub fn predict(&self, s: &Scenario) -> Result<f64, SurrogateError> {
        let x = self.scaler.transform(&encode(s)?);
        Ok(self.scaler.inverse_target(self.net.forward_one(&x)?))
    }

    /// Batched [`predict`](Self::predict). Agrees with row-by-row calls up to
    /// floating-point summation order.
    pub fn predict_many(&self, rows: &[Scenario]) -> Result<Vec<f64>, SurrogateError> {
        let mut x = Array2::zeros((rows.len(), N_FEATURES));
        for (i, s) in rows.iter().enumerate() {
            let f = self.scaler.transform(&encode(s)?);
            x.row_mut(i).assign(&ndarray::ArrayView1::from(&f));
        }
        let out = self.net.forward(x.view())?;
        Ok(out.iter().map(|&y| self.scaler.inverse_target(y)).collect())
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format_version: FORMAT_VERSION.to_string(),
            layer_sizes: self.net.layer_sizes.clone(),
            weights: self
                .net
                .weights
                .iter()
                .map(|w| w.outer_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: self.net.biases.iter().map(|b| b.to_vec()).collect(),
            scaler: self.scaler.clone(),
            feature_order: self.codec.clone(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<MlpModel, SurrogateError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SurrogateError::CorruptFile(e.to_string()))?;
        match value.get("format_version").and_then(|v| v.as_str()) {
            Some(FORMAT_VERSION) => {}
            Some(other) => return Err(SurrogateError::FormatVersionMismatch(other.to_string())),
            None => return Err(SurrogateError::CorruptFile("missing format_version".into())),
        }
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| SurrogateError::CorruptFile(e.to_string()))?;
        file.feature_order
            .validate()
            .map_err(|e| SurrogateError::CorruptFile(e.to_string()))?;
        let corrupt = |m: String| SurrogateError::CorruptFile(m);
        let mut net = Mlp::zeros(&file.layer_sizes).map_err(|e| corrupt(e.to_string()))?;
        if net.n_inputs() != N_FEATURES {
            return Err(corrupt(format!("network takes {} inputs, expected {N_FEATURES}", net.n_inputs())));
        }
        if file.weights.len() != net.weights.len() || file.biases.len() != net.biases.len() {
            return Err(corrupt("layer count does not match layer_sizes".into()));
        }
        for (l, rows) in file.weights.iter().enumerate() {
            let (r, c) = net.weights[l].dim();
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(corrupt(format!("weights of layer {l} are not {r}x{c}")));
            }
            let flat: Vec<f64> = rows.concat();
            net.weights[l] = Array2::from_shape_vec((r, c), flat).expect("checked shape");
            if file.biases[l].len() != r {
                return Err(corrupt(format!("biases of layer {l} are not length {r}")));
            }
            net.biases[l] = Array1::from(file.biases[l].clone());
        }
        let s = &file.scaler;
        if s.feature_mins.len() != N_FEATURES || s.feature_maxs.len() != N_FEATURES {
            return Err(corrupt("scaler does not cover every feature".into()));
        }
        Ok(MlpModel {
            net,
            codec: file.feature_order,
            scaler: file.scaler,
            metadata: file.metadata,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), SurrogateError> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text).map_err(|source| SurrogateError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<MlpModel, SurrogateError> {
        let text = std::fs::read_to_string(path).map_err(|source| SurrogateError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}
