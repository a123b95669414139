//! Labelled datasets: batch generation, persistence, descriptive statistics
//! and filtering.

mod filter;
mod generate;
mod io;
mod stats;

pub use filter::{filter_dataset, iqr_upper_fence, FilterReport, FilterRules, PlausibilityRule, RuleCount};
pub use generate::{generate_dataset, Generation, RowFailure};
pub use io::{
    load_dataset, meta_path, read_dataset_csv, save_dataset, write_dataset_csv, DATASET_CSV_HEADER,
};
pub use stats::{describe, histogram, pearson_matrix, quantile, ColumnStats, Histogram, StatsSummary};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::Scenario;

/// Number of dataset columns: seven scenario variables plus `max_range`.
pub const COLUMNS: usize = 8;
pub const COLUMN_NAMES: [&str; COLUMNS] = [
    "alt_sht", "vel_sht", "pit_sht", "alt_tgt", "vel_tgt", "hdg_tgt", "rgt_tgt", "max_range",
];
/// Index of `max_range` in [`COLUMN_NAMES`].
pub const TARGET: usize = 7;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("column `{0}` has zero variance")]
    ZeroVariance(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("{path}: {message}")]
    Meta { path: String, message: String },
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// One labelled scenario. Units: ft, kt, deg, NM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub alt_sht: f64,
    pub vel_sht: f64,
    pub pit_sht: f64,
    pub alt_tgt: f64,
    pub vel_tgt: f64,
    pub hdg_tgt: f64,
    pub rgt_tgt: f64,
    pub max_range: f64,
}

impl Sample {
    pub fn new(s: &Scenario, max_range: f64) -> Sample {
        Sample {
            alt_sht: s.alt_sht,
            vel_sht: s.vel_sht,
            pit_sht: s.pit_sht,
            alt_tgt: s.alt_tgt,
            vel_tgt: s.vel_tgt,
            hdg_tgt: s.hdg_tgt,
            rgt_tgt: s.rgt_tgt,
            max_range,
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            alt_sht: self.alt_sht,
            vel_sht: self.vel_sht,
            pit_sht: self.pit_sht,
            alt_tgt: self.alt_tgt,
            vel_tgt: self.vel_tgt,
            hdg_tgt: self.hdg_tgt,
            rgt_tgt: self.rgt_tgt,
        }
    }

    pub fn to_array(&self) -> [f64; COLUMNS] {
        [
            self.alt_sht,
            self.vel_sht,
            self.pit_sht,
            self.alt_tgt,
            self.vel_tgt,
            self.hdg_tgt,
            self.rgt_tgt,
            self.max_range,
        ]
    }

    pub fn from_array(v: [f64; COLUMNS]) -> Sample {
        Sample::new(&Scenario::from_array([v[0], v[1], v[2], v[3], v[4], v[5], v[6]]), v[7])
    }
}

/// Generation metadata stored next to a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub design_seed: Option<u64>,
    pub missile_config_hash: String,
    pub sim_version: String,
    pub row_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub meta: DatasetMeta,
}

impl Dataset {
    /// Dataset with metadata that only records the row count.
    pub fn from_samples(samples: Vec<Sample>) -> Dataset {
        let meta = DatasetMeta {
            design_seed: None,
            missile_config_hash: String::new(),
            sim_version: crate::VERSION.to_string(),
            row_count: samples.len(),
        };
        Dataset { samples, meta }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.to_array()[c]).collect()
    }

    /// Copy keeping only the rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let samples: Vec<Sample> = indices.iter().map(|&i| self.samples[i]).collect();
        let mut meta = self.meta.clone();
        meta.row_count = samples.len();
        Dataset { samples, meta }
    }
}
