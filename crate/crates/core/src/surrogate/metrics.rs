use serde::{Deserialize, Serialize};

use super::SurrogateError;

/// Regression error metrics in target units (NM).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    /// `None` when the targets have zero variance.
    pub r2: Option<f64>,
}

pub fn regression_metrics(y_true: &[f64], y_pred: &[f64]) -> Result<RegressionMetrics, SurrogateError> {
    if y_true.is_empty() {
        return Err(SurrogateError::EmptyRows);
    }
    if y_true.len() != y_pred.len() {
        return Err(SurrogateError::ShapeMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let n = y_true.len() as f64;
    let mut abs = 0.0;
    let mut ss_res = 0.0;
    for (t, p) in y_true.iter().zip(y_pred) {
        let e = t - p;
        abs += e.abs();
        ss_res += e * e;
    }
    let mean = y_true.iter().sum::<f64>() / n;
    let ss_tot: f64 = y_true.iter().map(|t| (t - mean) * (t - mean)).sum();
    let mse = ss_res / n;
    Ok(RegressionMetrics {
        mae: abs / n,
        mse,
        rmse: mse.sqrt(),
        r2: (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot),
    })
}
