use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Absolute(f64),
    /// Relative to `max(|primary|, |oracle|, floor)`.
    Relative { tol: f64, floor: f64 },
}

/// One primary-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub case: String,
    pub primary: f64,
    pub oracle: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(case: impl Into<String>, primary: f64, oracle: f64, tolerance: Tolerance) -> OracleReport {
        let abs_dev = (primary - oracle).abs();
        let floor = match tolerance {
            Tolerance::Absolute(_) => 0.0,
            Tolerance::Relative { floor, .. } => floor,
        };
        let scale = primary.abs().max(oracle.abs()).max(floor);
        let rel_dev = if abs_dev == 0.0 { 0.0 } else { abs_dev / scale };
        let pass = match tolerance {
            Tolerance::Absolute(tol) => abs_dev <= tol,
            Tolerance::Relative { tol, .. } => rel_dev <= tol,
        };
        OracleReport {
            case: case.into(),
            primary,
            oracle,
            abs_dev,
            rel_dev,
            tolerance,
            pass,
        }
    }
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(reports: &[OracleReport], mut w: W) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
