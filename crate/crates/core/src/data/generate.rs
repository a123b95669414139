use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, DatasetMeta, Sample};
use crate::sim::{find_max_range, MissileConfig, Scenario, SimError, NO_RANGE_SENTINEL_NM};

/// A design row the simulator rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    /// 0-based design row.
    pub row: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    /// Successful rows in design order.
    pub dataset: Dataset,
    pub failures: Vec<RowFailure>,
    /// Rows that missed even at the activation distance (recorded with the sentinel).
    pub no_range: usize,
}

/// Labels every design row with its maximum launch range using `jobs` worker
/// threads. Output order follows the design regardless of `jobs`.
///
/// `progress(done, total)` is called from worker threads after each row.
pub fn generate_dataset<P>(
    rows: &[Scenario],
    design_seed: Option<u64>,
    missile: &MissileConfig,
    jobs: usize,
    progress: P,
) -> Result<Generation, DataError>
where
    P: Fn(usize, usize) + Sync,
{
    missile.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| DataError::Pool(e.to_string()))?;
    let done = AtomicUsize::new(0);
    let total = rows.len();
    let results: Vec<Result<f64, SimError>> = pool.install(|| {
        rows.par_iter()
            .map(|s| {
                let r = match find_max_range(s, missile) {
                    Err(SimError::NoRange) => Ok(NO_RANGE_SENTINEL_NM),
                    other => other,
                };
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                r
            })
            .collect()
    });

    let mut samples = Vec::with_capacity(rows.len());
    let mut failures = Vec::new();
    let mut no_range = 0;
    for (row, (s, r)) in rows.iter().zip(results).enumerate() {
        match r {
            Ok(range) => {
                if range == NO_RANGE_SENTINEL_NM {
                    no_range += 1;
                }
                samples.push(Sample::new(s, range));
            }
            Err(e) => failures.push(RowFailure {
                row,
                error: e.to_string(),
            }),
        }
    }
    if !failures.is_empty() {
        log::warn!("{} of {} design rows failed", failures.len(), rows.len());
    }
    let meta = DatasetMeta {
        design_seed,
        missile_config_hash: missile.config_hash(),
        sim_version: crate::VERSION.to_string(),
        row_count: samples.len(),
    };
    Ok(Generation {
        dataset: Dataset { samples, meta },
        failures,
        no_range,
    })
}
