use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    adam_step, regression_metrics, AdamConfig, AdamState, Mlp, MlpModel, ModelMetadata, RegressionMetrics,
    SurrogateError,
};
use crate::data::Sample;
use crate::preprocess::{encode_all, FeatureCodec, Features, ScalerParams, Split, N_FEATURES};

const STREAM_INIT: u64 = 0;
const STREAM_SHUFFLE: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Widths of the hidden layers; input (9) and output (1) are implied.
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    /// Min-max scale the target as well as the inputs.
    pub scale_target: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_layers: vec![128, 128, 96, 96, 64, 64, 48, 48, 32, 16],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 8,
            max_epochs: 500,
            patience: 20,
            seed: 0,
            scale_target: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SurrogateError> {
        let bad = |m: String| Err(SurrogateError::InvalidConfig(m));
        if self.patience < 1 {
            return bad("patience must be at least 1".into());
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return bad(format!("betas must lie in (0, 1), got {} and {}", self.beta1, self.beta2));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return bad("batch_size and max_epochs must be positive".into());
        }
        if self.hidden_layers.contains(&0) {
            return bad("hidden layer widths must be positive".into());
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![N_FEATURES];
        sizes.extend(&self.hidden_layers);
        sizes.push(1);
        sizes
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    fn defaults_used(&self) -> Vec<String> {
        let d = TrainConfig::default();
        let mut out = Vec::new();
        if self.hidden_layers == d.hidden_layers {
            out.push("hidden_layers".into());
        }
        if self.learning_rate == d.learning_rate {
            out.push("learning_rate".into());
        }
        if self.batch_size == d.batch_size {
            out.push("batch_size".into());
        }
        out.push("init".into());
        out
    }
}

/// Scaled-target MSE after one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean of the mini-batch losses seen during the epoch.
    pub train_mse: f64,
    pub validation_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    /// Parameters from the best validation epoch.
    pub model: MlpModel,
    pub history: Vec<EpochRecord>,
}

struct Prepared {
    x: Array2<f64>,
    y: Array1<f64>,
}

fn prepare(rows: &[Features], targets: &[f64], scaler: &ScalerParams) -> Prepared {
    let mut x = Array2::zeros((rows.len(), N_FEATURES));
    for (i, r) in rows.iter().enumerate() {
        x.row_mut(i).assign(&ndarray::ArrayView1::from(&scaler.transform(r)));
    }
    let y = targets.iter().map(|&t| scaler.transform_target(t)).collect();
    Prepared { x, y }
}

/// Fits the scaler on `train`, then runs mini-batch Adam with early stopping on
/// the validation MSE. The returned model carries the best epoch's parameters.
pub fn train(train: &[Sample], validation: &[Sample], cfg: &TrainConfig) -> Result<Trained, SurrogateError> {
    cfg.validate()?;
    if train.is_empty() || validation.is_empty() {
        return Err(SurrogateError::EmptyRows);
    }
    let (xt, yt) = encode_all(train)?;
    let (xv, yv) = encode_all(validation)?;
    let mut scaler = ScalerParams::fit(&xt, &yt)?;
    if !cfg.scale_target {
        scaler.target_min = 0.0;
        scaler.target_max = 1.0;
    }
    let tr = prepare(&xt, &yt, &scaler);
    let va = prepare(&xv, &yv, &scaler);

    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_rng.set_stream(STREAM_INIT);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(STREAM_SHUFFLE);
    let mut net = Mlp::he_uniform(&cfg.layer_sizes(), &mut init_rng)?;
    let mut state = AdamState::new(&net);
    let adam = cfg.adam();

    let n = train.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut history: Vec<EpochRecord> = Vec::new();
    let mut best: Option<(usize, f64, Mlp)> = None;
    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let xb = tr.x.select(Axis(0), batch);
            let yb = tr.y.select(Axis(0), batch);
            let (loss, grads) = net.backward(xb.view(), yb.view())?;
            if !loss.is_finite() {
                return Err(SurrogateError::Diverged { epoch, history });
            }
            adam_step(&mut net, &grads, &mut state, &adam);
            total += loss * batch.len() as f64;
        }
        let validation_mse = net.loss(va.x.view(), va.y.view())?;
        if !validation_mse.is_finite() || !net.is_finite() {
            return Err(SurrogateError::Diverged { epoch, history });
        }
        history.push(EpochRecord {
            epoch,
            train_mse: total / n as f64,
            validation_mse,
        });
        match &best {
            Some((_, b, _)) if validation_mse >= *b => {}
            _ => best = Some((epoch, validation_mse, net.clone())),
        }
        let best_epoch = best.as_ref().map_or(0, |b| b.0);
        log::debug!("epoch {epoch}: train {:.3e} validation {validation_mse:.3e}", total / n as f64);
        if epoch - best_epoch >= cfg.patience {
            break;
        }
    }

    let (best_epoch, validation_mse, net) = best.expect("at least one epoch ran");
    let metadata = ModelMetadata {
        seed: cfg.seed,
        epochs_run: history.len(),
        best_epoch,
        train_mse: history[best_epoch].train_mse,
        validation_mse,
        training_rows: train.len(),
        validation_rows: validation.len(),
        learning_rate: cfg.learning_rate,
        batch_size: cfg.batch_size,
        init: "he_uniform".into(),
        defaults_used: cfg.defaults_used(),
    };
    Ok(Trained {
        model: MlpModel {
            net,
            codec: FeatureCodec::default(),
            scaler,
            metadata,
        },
        history,
    })
}

/// Metrics of `model` on `rows`, in NM.
pub fn evaluate(model: &MlpModel, rows: &[Sample]) -> Result<RegressionMetrics, SurrogateError> {
    if rows.is_empty() {
        return Err(SurrogateError::EmptyRows);
    }
    let scenarios: Vec<_> = rows.iter().map(Sample::scenario).collect();
    let pred = model.predict_many(&scenarios)?;
    let truth: Vec<f64> = rows.iter().map(|s| s.max_range).collect();
    regression_metrics(&truth, &pred)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub metrics: RegressionMetrics,
    pub best_epoch: usize,
    pub epochs_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    pub mean: RegressionMetrics,
    /// Sample standard deviation across folds.
    pub std: RegressionMetrics,
}

/// k-fold cross-validation over the training partition of `split`. Fold `i`
/// trains on the other folds (with its own scaler), uses fold `i` for early
/// stopping and is scored on fold `i`. Folds run in parallel; fold `i` uses
/// seed `cfg.seed + i`.
pub fn cross_validate(samples: &[Sample], split: &Split, cfg: &TrainConfig) -> Result<CvReport, SurrogateError> {
    let folds: Vec<FoldResult> = (0..split.folds.len())
        .into_par_iter()
        .map(|i| {
            let (train_idx, val_idx) = split.fold_pair(i);
            let tr: Vec<Sample> = train_idx.iter().map(|&k| samples[k]).collect();
            let va: Vec<Sample> = val_idx.iter().map(|&k| samples[k]).collect();
            let fold_cfg = TrainConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..cfg.clone()
            };
            let trained = train(&tr, &va, &fold_cfg)?;
            Ok(FoldResult {
                fold: i,
                metrics: evaluate(&trained.model, &va)?,
                best_epoch: trained.model.metadata.best_epoch,
                epochs_run: trained.model.metadata.epochs_run,
            })
        })
        .collect::<Result<_, SurrogateError>>()?;
    let (mean, std) = summarize(&folds);
    Ok(CvReport { folds, mean, std })
}

fn summarize(folds: &[FoldResult]) -> (RegressionMetrics, RegressionMetrics) {
    let stat = |f: &dyn Fn(&RegressionMetrics) -> f64| {
        let v: Vec<f64> = folds.iter().map(|r| f(&r.metrics)).collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, var.sqrt())
    };
    let mae = stat(&|m| m.mae);
    let mse = stat(&|m| m.mse);
    let rmse = stat(&|m| m.rmse);
    let r2 = if folds.iter().all(|f| f.metrics.r2.is_some()) {
        let s = stat(&|m| m.r2.expect("checked"));
        (Some(s.0), Some(s.1))
    } else {
        (None, None)
    };
    (
        RegressionMetrics {
            mae: mae.0,
            mse: mse.0,
            rmse: rmse.0,
            r2: r2.0,
        },
        RegressionMetrics {
            mae: mae.1,
            mse: mse.1,
            rmse: rmse.1,
            r2: r2.1,
        },
    )
}
