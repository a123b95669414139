use wez_core::data::{ColumnStats, DataError, StatsSummary, COLUMNS, COLUMN_NAMES};

fn column(rows: &[[f64; COLUMNS]], c: usize) -> Vec<f64> {
    rows.iter().map(|r| r[c]).collect()
}

fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

fn percentile(v: &[f64], p: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite data"));
    let h = (s.len() as f64 - 1.0) * p;
    let i = h as usize;
    if i + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[i] * (1.0 - (h - i as f64)) + s[i + 1] * (h - i as f64)
}

/// Per-column mean, sample standard deviation, extremes and quartiles.
pub fn naive_stats(rows: &[[f64; COLUMNS]]) -> Result<StatsSummary, DataError> {
    if rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let n = rows.len();
    let mut columns = Vec::with_capacity(COLUMNS);
    for (c, name) in COLUMN_NAMES.iter().enumerate() {
        let v = column(rows, c);
        let m = mean(&v);
        let mut ss = 0.0;
        for x in &v {
            ss += (x - m).powi(2);
        }
        columns.push(ColumnStats {
            name: name.to_string(),
            mean: m,
            std: if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 },
            min: v.iter().cloned().fold(f64::INFINITY, f64::min),
            q25: percentile(&v, 0.25),
            q50: percentile(&v, 0.50),
            q75: percentile(&v, 0.75),
            max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(StatsSummary { rows: n, columns })
}

/// Pearson correlation of every column pair from the covariance formula.
pub fn naive_pearson(rows: &[[f64; COLUMNS]]) -> Result<[[f64; COLUMNS]; COLUMNS], DataError> {
    if rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let cols: Vec<Vec<f64>> = (0..COLUMNS).map(|c| column(rows, c)).collect();
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let mut cov = [[0.0; COLUMNS]; COLUMNS];
    for a in 0..COLUMNS {
        for b in 0..COLUMNS {
            let mut s = 0.0;
            for i in 0..rows.len() {
                s += (cols[a][i] - means[a]) * (cols[b][i] - means[b]);
            }
            cov[a][b] = s;
        }
    }
    if let Some(c) = (0..COLUMNS).find(|&c| cov[c][c] == 0.0) {
        return Err(DataError::ZeroVariance(COLUMN_NAMES[c]));
    }
    let mut r = [[0.0; COLUMNS]; COLUMNS];
    for a in 0..COLUMNS {
        for b in 0..COLUMNS {
            r[a][b] = cov[a][b] / (cov[a][a] * cov[b][b]).sqrt();
        }
    }
    Ok(r)
}
