//! Simulation-to-surrogate pipeline for the maximum launch range of a
//! Weapon Engagement Zone (WEZ).

pub mod data;
pub mod doe;
pub mod preprocess;
pub mod sim;
pub mod surrogate;
pub mod units;

/// Crate version, recorded in dataset metadata as the simulator version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
