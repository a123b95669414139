//! Slow, independent reference implementations for checking `wez-core`:
//! an exhaustive launch-range scan, finite-difference gradients and
//! textbook statistics. Results are reported as [`OracleReport`] records.

mod gradient;
mod range;
mod report;
mod stats;

pub use gradient::{fd_gradient, fd_partial, naive_loss};
pub use range::{range_grid, scan_max_range};
pub use report::{write_jsonl, OracleReport, Tolerance};
pub use stats::{naive_pearson, naive_stats};
