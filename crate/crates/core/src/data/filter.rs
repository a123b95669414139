use serde::{Deserialize, Serialize};

use super::stats::quantile;
use super::{Dataset, Sample, COLUMN_NAMES};

/// Tukey upper fence `q3 + 1.5 (q3 - q1)`. Expects `q1 <= q3`.
pub fn iqr_upper_fence(q1: f64, q3: f64) -> f64 {
    q3 + 1.5 * (q3 - q1)
}

/// A row predicate; rows for which it is false are removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlausibilityRule {
    /// `|a - b| <= limit`
    MaxAbsDifference { a: String, b: String, limit: f64 },
    /// `min <= column <= max`; either bound may be omitted.
    Range {
        column: String,
        #[serde(default)]
        min: Option<f64>,
        #[serde(default)]
        max: Option<f64>,
    },
}

fn column_index(name: &str) -> Option<usize> {
    COLUMN_NAMES.iter().position(|c| *c == name)
}

impl PlausibilityRule {
    pub fn describe(&self) -> String {
        match self {
            PlausibilityRule::MaxAbsDifference { a, b, limit } => format!("|{a} - {b}| <= {limit}"),
            PlausibilityRule::Range { column, min, max } => match (min, max) {
                (Some(lo), Some(hi)) => format!("{lo} <= {column} <= {hi}"),
                (Some(lo), None) => format!("{column} >= {lo}"),
                (None, Some(hi)) => format!("{column} <= {hi}"),
                (None, None) => format!("{column} (unbounded)"),
            },
        }
    }

    /// Errors name an unknown column.
    pub fn validate(&self) -> Result<(), String> {
        let names: Vec<&str> = match self {
            PlausibilityRule::MaxAbsDifference { a, b, .. } => vec![a, b],
            PlausibilityRule::Range { column, .. } => vec![column],
        };
        for n in names {
            if column_index(n).is_none() {
                return Err(format!("unknown column `{n}` in rule {}", self.describe()));
            }
        }
        Ok(())
    }

    fn keeps(&self, s: &Sample) -> bool {
        let v = s.to_array();
        let col = |n: &str| v[column_index(n).expect("validated column")];
        match self {
            PlausibilityRule::MaxAbsDifference { a, b, limit } => (col(a) - col(b)).abs() <= *limit,
            PlausibilityRule::Range { column, min, max } => {
                let x = col(column);
                min.is_none_or(|lo| x >= lo) && max.is_none_or(|hi| x <= hi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterRules {
    /// NM; rows below are removed (the 2 km activation distance).
    pub activation_floor: f64,
    pub fence_k: f64,
    /// Frozen upper fence (NM). When absent it is computed from the rows that
    /// survive the floor.
    pub fence: Option<f64>,
    pub plausibility: Vec<PlausibilityRule>,
}

impl Default for FilterRules {
    fn default() -> Self {
        FilterRules {
            activation_floor: 1.079,
            fence_k: 1.5,
            fence: None,
            plausibility: vec![PlausibilityRule::MaxAbsDifference {
                a: "alt_sht".into(),
                b: "alt_tgt".into(),
                limit: 25_000.0,
            }],
        }
    }
}

impl FilterRules {
    pub fn validate(&self) -> Result<(), String> {
        if !self.activation_floor.is_finite() {
            return Err(format!("activation_floor must be finite, got {}", self.activation_floor));
        }
        if !(self.fence_k.is_finite() && self.fence_k >= 0.0) {
            return Err(format!("fence_k must be >= 0, got {}", self.fence_k));
        }
        self.plausibility.iter().try_for_each(|r| r.validate())
    }

    /// Same rules with the fence frozen at `fence`.
    pub fn with_fence(&self, fence: f64) -> FilterRules {
        FilterRules {
            fence: Some(fence),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleCount {
    pub rule: String,
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_rows: usize,
    pub activation_floor: f64,
    pub floor_removed: usize,
    /// `None` when no rows survived the floor.
    pub fence: Option<f64>,
    pub fence_removed: usize,
    pub plausibility: Vec<RuleCount>,
    pub output_rows: usize,
}

impl FilterReport {
    pub fn removed(&self) -> usize {
        self.floor_removed + self.fence_removed + self.plausibility.iter().map(|r| r.removed).sum::<usize>()
    }
}

/// Applies the activation floor, then the upper fence, then each plausibility
/// rule in order. Rules are assumed valid (see [`FilterRules::validate`]).
pub fn filter_dataset(dataset: &Dataset, rules: &FilterRules) -> (Dataset, FilterReport) {
    let input_rows = dataset.len();
    let mut rows: Vec<Sample> = dataset
        .samples
        .iter()
        .filter(|s| s.max_range >= rules.activation_floor)
        .copied()
        .collect();
    let floor_removed = input_rows - rows.len();

    let fence = rules.fence.or_else(|| {
        if rows.is_empty() {
            return None;
        }
        let mut r: Vec<f64> = rows.iter().map(|s| s.max_range).collect();
        r.sort_by(f64::total_cmp);
        let (q1, q3) = (quantile(&r, 0.25), quantile(&r, 0.75));
        Some(q3 + rules.fence_k * (q3 - q1))
    });
    let before = rows.len();
    if let Some(f) = fence {
        rows.retain(|s| s.max_range <= f);
    }
    let fence_removed = before - rows.len();

    let mut plausibility = Vec::with_capacity(rules.plausibility.len());
    for rule in &rules.plausibility {
        let before = rows.len();
        rows.retain(|s| rule.keeps(s));
        plausibility.push(RuleCount {
            rule: rule.describe(),
            removed: before - rows.len(),
        });
    }

    let mut meta = dataset.meta.clone();
    meta.row_count = rows.len();
    let report = FilterReport {
        input_rows,
        activation_floor: rules.activation_floor,
        floor_removed,
        fence,
        fence_removed,
        plausibility,
        output_rows: rows.len(),
    };
    debug_assert_eq!(report.removed(), input_rows - report.output_rows);
    (Dataset { samples: rows, meta }, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TARGET;

    fn sample(alt_sht: f64, alt_tgt: f64, max_range: f64) -> Sample {
        Sample {
            alt_sht,
            vel_sht: 500.0,
            pit_sht: 0.0,
            alt_tgt,
            vel_tgt: 500.0,
            hdg_tgt: 0.0,
            rgt_tgt: 0.0,
            max_range,
        }
    }

    #[test]
    fn fence_formula() {
        assert!((iqr_upper_fence(5.55, 16.64) - 33.275).abs() < 1e-12);
        assert_eq!(iqr_upper_fence(3.0, 3.0), 3.0);
        assert_eq!(iqr_upper_fence(0.0, 2.0), 5.0);
    }

    #[test]
    fn each_stage_removes_its_rows() {
        let d = Dataset::from_samples(vec![
            sample(20_000.0, 20_000.0, 0.08),
            sample(20_000.0, 20_000.0, 40.87),
            sample(1_000.0, 45_000.0, 10.0),
            sample(20_000.0, 25_000.0, 12.0),
        ]);
        let rules = FilterRules::default().with_fence(33.28);
        let (out, report) = filter_dataset(&d, &rules);
        assert_eq!(report.floor_removed, 1);
        assert_eq!(report.fence_removed, 1);
        assert_eq!(report.plausibility[0].removed, 1);
        assert_eq!(out.samples, vec![sample(20_000.0, 25_000.0, 12.0)]);
        assert_eq!(report.removed(), 3);
        assert_eq!(out.meta.row_count, 1);
    }

    #[test]
    fn frozen_fence_makes_refiltering_idempotent() {
        let samples: Vec<Sample> = (0..40)
            .map(|k| sample(10_000.0, 12_000.0, if k % 10 == 0 { 90.0 + k as f64 } else { 2.0 + 0.3 * k as f64 }))
            .collect();
        let d = Dataset::from_samples(samples);
        let (once, report) = filter_dataset(&d, &FilterRules::default());
        let fence = report.fence.unwrap();
        assert!(report.fence_removed > 0);
        let (twice, again) = filter_dataset(&once, &FilterRules::default().with_fence(fence));
        assert_eq!(once, twice);
        assert_eq!(again.removed(), 0);
    }

    #[test]
    fn rules_round_trip_json() {
        let rules = FilterRules {
            plausibility: vec![
                PlausibilityRule::MaxAbsDifference {
                    a: "alt_sht".into(),
                    b: "alt_tgt".into(),
                    limit: 25_000.0,
                },
                PlausibilityRule::Range {
                    column: "vel_tgt".into(),
                    min: Some(420.0),
                    max: None,
                },
            ],
            ..FilterRules::default()
        };
        let text = serde_json::to_string(&rules).unwrap();
        let back: FilterRules = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rules);
        let bad = PlausibilityRule::Range {
            column: "speed".into(),
            min: None,
            max: Some(1.0),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn target_index_is_max_range() {
        assert_eq!(COLUMN_NAMES[TARGET], "max_range");
    }
}
