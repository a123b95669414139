use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, COLUMNS, COLUMN_NAMES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single row.
    pub std: f64,
    pub min: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub rows: usize,
    pub columns: Vec<ColumnStats>,
}

impl StatsSummary {
    pub fn column(&self, name: &str) -> Option<&ColumnStats> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Quantile of sorted data by linear interpolation between closest ranks
/// (position `p * (n - 1)`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn column_stats(name: &str, values: &[f64]) -> ColumnStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
    let std = if values.len() > 1 {
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    ColumnStats {
        name: name.to_string(),
        mean,
        std,
        min: sorted[0],
        q25: quantile(&sorted, 0.25),
        q50: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    }
}

pub fn describe(dataset: &Dataset) -> Result<StatsSummary, DataError> {
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let columns = (0..COLUMNS)
        .map(|c| column_stats(COLUMN_NAMES[c], &dataset.column(c)))
        .collect();
    Ok(StatsSummary {
        rows: dataset.len(),
        columns,
    })
}

/// Pearson correlation between every pair of columns, computed from centred data.
pub fn pearson_matrix(dataset: &Dataset) -> Result<[[f64; COLUMNS]; COLUMNS], DataError> {
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let n = dataset.len() as f64;
    let cols: Vec<Vec<f64>> = (0..COLUMNS).map(|c| dataset.column(c)).collect();
    let centred: Vec<Vec<f64>> = cols
        .iter()
        .map(|col| {
            let mean = col.iter().sum::<f64>() / n;
            col.iter().map(|x| x - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centred
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    for (c, &norm) in norms.iter().enumerate() {
        if norm == 0.0 {
            return Err(DataError::ZeroVariance(COLUMN_NAMES[c]));
        }
    }
    let mut r = [[0.0; COLUMNS]; COLUMNS];
    for a in 0..COLUMNS {
        r[a][a] = 1.0;
        for b in a + 1..COLUMNS {
            let dot: f64 = centred[a].iter().zip(&centred[b]).map(|(x, y)| x * y).sum();
            let v = (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0);
            r[a][b] = v;
            r[b][a] = v;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width histogram over `[min, max]`; the last bin is closed. A constant
/// column gets bins spanning `[v, v + 1]`.
pub fn histogram(values: &[f64], n_bins: usize) -> Result<Histogram, DataError> {
    if n_bins == 0 {
        return Err(DataError::NoBins);
    }
    if values.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / n_bins as f64 } else { 1.0 / n_bins as f64 };
    let edges: Vec<f64> = (0..=n_bins).map(|k| lo + k as f64 * width).collect();
    let mut counts = vec![0; n_bins];
    for &x in values {
        let k = (((x - lo) / width).floor() as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { edges, counts })
}
