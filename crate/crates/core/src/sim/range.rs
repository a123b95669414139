use serde::{Deserialize, Serialize};

use super::{engage, MissileConfig, Scenario, SimError, TargetPolicy};
use crate::units;

/// Value recorded in datasets when no launch range hits. It sits below the
/// activation floor so the floor filter removes it.
pub const NO_RANGE_SENTINEL_NM: f64 = 0.0;

/// Bisection bracket and tolerance, in NM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSearch {
    pub tolerance: f64,
    pub upper: f64,
}

impl Default for RangeSearch {
    fn default() -> Self {
        RangeSearch {
            tolerance: 0.01,
            upper: 60.0,
        }
    }
}

/// Whether a launch at `range_nm` hits.
pub fn hits_at(
    scenario: &Scenario,
    range_nm: f64,
    missile: &MissileConfig,
    policy: &TargetPolicy,
) -> Result<bool, SimError> {
    Ok(engage(scenario, range_nm, missile, policy)?
        .outcome
        .is_hit())
}

/// Largest launch range (NM) that hits, by bisection between the activation
/// distance and `search.upper`. Assumes the hit set is an interval starting at
/// the activation distance; [`audit_range`] checks that assumption.
pub fn solve_range(
    scenario: &Scenario,
    missile: &MissileConfig,
    policy: &TargetPolicy,
    search: &RangeSearch,
) -> Result<f64, SimError> {
    let mut lo = units::m_to_nm(missile.activation_distance);
    let mut hi = search.upper;
    if !(search.tolerance > 0.0 && hi > lo) {
        return Err(SimError::Config(format!(
            "range search needs tolerance > 0 and upper > {lo} NM"
        )));
    }
    if !hits_at(scenario, lo, missile, policy)? {
        return Err(SimError::NoRange);
    }
    if hits_at(scenario, hi, missile, policy)? {
        return Ok(hi);
    }
    while hi - lo > search.tolerance {
        let mid = 0.5 * (lo + hi);
        if hits_at(scenario, mid, missile, policy)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Maximum launch range against a non-maneuvering target.
pub fn find_max_range(scenario: &Scenario, missile: &MissileConfig) -> Result<f64, SimError> {
    solve_range(
        scenario,
        missile,
        &TargetPolicy::non_maneuvering(),
        &RangeSearch::default(),
    )
}

/// No-escape range: maximum launch range against a target pulling a 5 G
/// horizontal break after `delay` seconds.
pub fn find_nez_range(
    scenario: &Scenario,
    missile: &MissileConfig,
    delay: f64,
) -> Result<f64, SimError> {
    solve_range(
        scenario,
        missile,
        &TargetPolicy::evasive(delay),
        &RangeSearch::default(),
    )
}

/// Grid points contradicting a bisection result: a hit beyond it or a miss
/// before it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeAudit {
    /// `None` when the solver reported no range.
    pub solved: Option<f64>,
    pub hits_beyond: Vec<f64>,
    pub misses_within: Vec<f64>,
}

impl RangeAudit {
    pub fn is_consistent(&self) -> bool {
        self.hits_beyond.is_empty() && self.misses_within.is_empty()
    }
}

/// Debug cross-check of [`solve_range`] against a uniform grid of launch ranges.
pub fn audit_range(
    scenario: &Scenario,
    missile: &MissileConfig,
    policy: &TargetPolicy,
    search: &RangeSearch,
    grid_step: f64,
) -> Result<RangeAudit, SimError> {
    if !(grid_step > 0.0) {
        return Err(SimError::Config(format!("grid step must be positive, got {grid_step}")));
    }
    let solved = match solve_range(scenario, missile, policy, search) {
        Ok(r) => Some(r),
        Err(SimError::NoRange) => None,
        Err(e) => return Err(e),
    };
    let floor = units::m_to_nm(missile.activation_distance);
    let mut audit = RangeAudit {
        solved,
        hits_beyond: Vec::new(),
        misses_within: Vec::new(),
    };
    let mut k = 0u32;
    loop {
        let r = floor + f64::from(k) * grid_step;
        if r > search.upper {
            break;
        }
        let hit = hits_at(scenario, r, missile, policy)?;
        match solved {
            Some(s) if r <= s && !hit => audit.misses_within.push(r),
            Some(s) if r > s + search.tolerance && hit => audit.hits_beyond.push(r),
            None if hit => audit.hits_beyond.push(r),
            _ => {}
        }
        k += 1;
    }
    Ok(audit)
}
