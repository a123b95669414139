use rayon::prelude::*;
use wez_core::sim::{engage, MissileConfig, RangeSearch, Scenario, SimError, TargetPolicy};
use wez_core::units;

/// Launch ranges visited by [`scan_max_range`]: the activation distance, then
/// every `step` NM up to `upper`, with `upper` itself always included.
pub fn range_grid(missile: &MissileConfig, upper: f64, step: f64) -> Vec<f64> {
    let start = units::m_to_nm(missile.activation_distance);
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let r = start + f64::from(k) * step;
        if r > upper + 1e-9 {
            break;
        }
        grid.push(r.min(upper));
        k += 1;
    }
    if grid.last().is_none_or(|&r| r < upper - 1e-9) {
        grid.push(upper);
    }
    grid
}

/// Largest grid range (NM) at which a launch hits a non-maneuvering target,
/// found by simulating every grid point. `SimError::NoRange` if none hits.
pub fn scan_max_range(scenario: &Scenario, missile: &MissileConfig, grid_step: f64) -> Result<f64, SimError> {
    if !(grid_step > 0.0) {
        return Err(SimError::Config(format!("grid step must be positive, got {grid_step}")));
    }
    let policy = TargetPolicy::non_maneuvering();
    let grid = range_grid(missile, RangeSearch::default().upper, grid_step);
    let hits = grid
        .par_iter()
        .map(|&r| Ok(engage(scenario, r, missile, &policy)?.outcome.is_hit()))
        .collect::<Result<Vec<bool>, SimError>>()?;
    grid.iter()
        .zip(&hits)
        .rev()
        .find(|(_, &hit)| hit)
        .map(|(&r, _)| r)
        .ok_or(SimError::NoRange)
}
