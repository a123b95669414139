//! Feature encoding, min-max scaling and train/validation/test splits.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Sample;
use crate::sim::Scenario;

pub const N_FEATURES: usize = 9;
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "alt_sht",
    "vel_sht",
    "pit_sht",
    "alt_tgt",
    "vel_tgt",
    "sin_hdg_tgt",
    "cos_hdg_tgt",
    "sin_rgt_tgt",
    "cos_rgt_tgt",
];
pub const TARGET_NAME: &str = "max_range";

pub type Features = [f64; N_FEATURES];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreprocessError {
    #[error("non-finite value in `{0}`")]
    NonFinite(&'static str),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("cannot fit a scaler on zero rows")]
    Empty,
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("feature order {0:?} does not match this build")]
    FeatureOrder(Vec<String>),
}

/// Input encoding: angles become (sin, cos) pairs, everything else passes through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCodec {
    pub features: Vec<String>,
    pub target: String,
}

impl Default for FeatureCodec {
    fn default() -> Self {
        FeatureCodec {
            features: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            target: TARGET_NAME.to_string(),
        }
    }
}

impl FeatureCodec {
    /// Checks a stored feature order against the one implemented by [`encode`].
    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.features.iter().ne(FEATURE_NAMES.iter()) || self.target != TARGET_NAME {
            return Err(PreprocessError::FeatureOrder(self.features.clone()));
        }
        Ok(())
    }
}

/// Encodes one scenario; angles are in degrees.
pub fn encode(s: &Scenario) -> Result<Features, PreprocessError> {
    for (name, v) in Scenario::FIELDS.iter().zip(s.to_array()) {
        if !v.is_finite() {
            return Err(PreprocessError::NonFinite(name));
        }
    }
    let (sh, ch) = s.hdg_tgt.to_radians().sin_cos();
    let (sr, cr) = s.rgt_tgt.to_radians().sin_cos();
    Ok([s.alt_sht, s.vel_sht, s.pit_sht, s.alt_tgt, s.vel_tgt, sh, ch, sr, cr])
}

pub fn encode_sample(s: &Sample) -> Result<(Features, f64), PreprocessError> {
    if !s.max_range.is_finite() {
        return Err(PreprocessError::NonFinite(TARGET_NAME));
    }
    Ok((encode(&s.scenario())?, s.max_range))
}

/// Encoded design matrix and targets for a set of samples.
pub fn encode_all(samples: &[Sample]) -> Result<(Vec<Features>, Vec<f64>), PreprocessError> {
    samples.iter().map(encode_sample).collect::<Result<Vec<_>, _>>().map(|v| v.into_iter().unzip())
}

/// Per-column min and max fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub feature_mins: Vec<f64>,
    pub feature_maxs: Vec<f64>,
    pub target_min: f64,
    pub target_max: f64,
}

impl ScalerParams {
    pub fn fit(features: &[Features], targets: &[f64]) -> Result<ScalerParams, PreprocessError> {
        if features.is_empty() || targets.is_empty() {
            return Err(PreprocessError::Empty);
        }
        let mut mins = vec![f64::INFINITY; N_FEATURES];
        let mut maxs = vec![f64::NEG_INFINITY; N_FEATURES];
        for row in features {
            for c in 0..N_FEATURES {
                mins[c] = mins[c].min(row[c]);
                maxs[c] = maxs[c].max(row[c]);
            }
        }
        let target_min = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let target_max = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let params = ScalerParams {
            feature_mins: mins,
            feature_maxs: maxs,
            target_min,
            target_max,
        };
        for c in params.degenerate_features() {
            log::warn!("feature `{}` is constant in the training rows; it scales to 0", FEATURE_NAMES[c]);
        }
        Ok(params)
    }

    /// Indices of features with `min == max`.
    pub fn degenerate_features(&self) -> Vec<usize> {
        (0..self.feature_mins.len())
            .filter(|&c| self.feature_maxs[c] == self.feature_mins[c])
            .collect()
    }

    /// `(x - min) / (max - min)`, unclamped; 0 for a degenerate feature.
    pub fn transform(&self, x: &Features) -> Features {
        std::array::from_fn(|c| scale(x[c], self.feature_mins[c], self.feature_maxs[c]))
    }

    pub fn transform_target(&self, y: f64) -> f64 {
        scale(y, self.target_min, self.target_max)
    }

    pub fn inverse_target(&self, y_scaled: f64) -> f64 {
        self.target_min + y_scaled * (self.target_max - self.target_min)
    }
}

fn scale(x: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (x - lo) / (hi - lo)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub k: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.2,
            k: 5,
            seed: 0,
        }
    }
}

/// Row indices of the test partition and of the `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub test: Vec<usize>,
    pub folds: Vec<Vec<usize>>,
}

impl Split {
    /// All rows outside the test partition, fold by fold.
    pub fn train_partition(&self) -> Vec<usize> {
        self.folds.concat()
    }

    /// `(train, validate)` for fold `i`: fold `i` is held out.
    pub fn fold_pair(&self, i: usize) -> (Vec<usize>, Vec<usize>) {
        let train = self
            .folds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        (train, self.folds[i].clone())
    }
}

/// Shuffles `0..n_rows` with the split seed, takes `round(test_fraction * n)` rows
/// for testing and deals the rest into `k` folds whose sizes differ by at most
/// one, larger folds first.
pub fn split(n_rows: usize, spec: &SplitSpec) -> Result<Split, PreprocessError> {
    if !(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0) {
        return Err(PreprocessError::InvalidSplit(format!(
            "test_fraction must be in [0, 1), got {}",
            spec.test_fraction
        )));
    }
    if spec.k < 2 {
        return Err(PreprocessError::InvalidSplit(format!("k must be at least 2, got {}", spec.k)));
    }
    let n_test = (spec.test_fraction * n_rows as f64).round() as usize;
    if n_rows < spec.k + 1 || n_rows - n_test.min(n_rows) < spec.k {
        return Err(PreprocessError::TooFewRows {
            needed: spec.k + 1,
            got: n_rows,
        });
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let (test, rest) = order.split_at(n_test);
    let base = rest.len() / spec.k;
    let extra = rest.len() % spec.k;
    let mut folds = Vec::with_capacity(spec.k);
    let mut start = 0;
    for i in 0..spec.k {
        let size = base + usize::from(i < extra);
        folds.push(rest[start..start + size].to_vec());
        start += size;
    }
    Ok(Split {
        test: test.to_vec(),
        folds,
    })
}
