//! Point-mass missile fly-out simulation and the range solvers built on it.
//!
//! The model has five degrees of freedom: three translational plus flight-path
//! angle and heading (skid-to-turn, no roll). All computation is SI in a flat-earth
//! NED frame with the shooter at the origin, nose pointing north.

mod atmosphere;
mod flight;
mod missile;
mod range;
mod target;

pub use atmosphere::{atmosphere_density, MAX_ALTITUDE, RHO0};
pub use flight::{
    engage, simulate_flight, EngagementResult, FlightTrace, MissReason, MissileState, Outcome,
    TRACE_CSV_HEADER,
};
pub use missile::{LoftCutoff, MachCd, MissileConfig};
pub use range::{
    audit_range, find_max_range, find_nez_range, hits_at, solve_range, RangeAudit, RangeSearch,
    NO_RANGE_SENTINEL_NM,
};
pub use target::{EvasionPlane, TargetMode, TargetPolicy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {field} = {value} ({reason})")]
    InvalidScenario {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid missile configuration: {0}")]
    Config(String),
    #[error("invalid target policy: {0}")]
    Policy(String),
    #[error("{quantity} = {value} is outside the model domain")]
    OutOfDomain { quantity: &'static str, value: f64 },
    #[error("launch range must be positive and finite, got {0} NM")]
    InvalidRange(f64),
    #[error("missile misses even at the activation distance")]
    NoRange,
}

/// Launch conditions in external units: ft, kt, deg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Shooter altitude (ft).
    pub alt_sht: f64,
    /// Shooter true airspeed (kt).
    pub vel_sht: f64,
    /// Shooter pitch angle (deg).
    pub pit_sht: f64,
    /// Target altitude (ft).
    pub alt_tgt: f64,
    /// Target true airspeed (kt).
    pub vel_tgt: f64,
    /// Target heading relative to the shooter's nose (deg).
    pub hdg_tgt: f64,
    /// Target off-boresight angle (deg).
    pub rgt_tgt: f64,
}

/// Physical validity limits. These are wider than the sampling box so that custom
/// designs are still accepted; the atmosphere model caps altitude.
const MAX_ALT_FT: f64 = 65_000.0;
const MAX_SPEED_KT: f64 = 2_000.0;

impl Scenario {
    pub const FIELDS: [&'static str; 7] = [
        "alt_sht", "vel_sht", "pit_sht", "alt_tgt", "vel_tgt", "hdg_tgt", "rgt_tgt",
    ];

    pub fn from_array(v: [f64; 7]) -> Scenario {
        Scenario {
            alt_sht: v[0],
            vel_sht: v[1],
            pit_sht: v[2],
            alt_tgt: v[3],
            vel_tgt: v[4],
            hdg_tgt: v[5],
            rgt_tgt: v[6],
        }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.alt_sht,
            self.vel_sht,
            self.pit_sht,
            self.alt_tgt,
            self.vel_tgt,
            self.hdg_tgt,
            self.rgt_tgt,
        ]
    }

    /// Copy with the heading wrapped into (-180, 180].
    pub fn normalized(mut self) -> Scenario {
        self.hdg_tgt = units::wrap_deg(self.hdg_tgt);
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (field, value) in Self::FIELDS.iter().zip(self.to_array()) {
            if !value.is_finite() {
                return Err(SimError::InvalidScenario {
                    field,
                    value,
                    reason: "not finite",
                });
            }
        }
        let check = |field, value: f64, lo: f64, hi: f64, reason| {
            if value < lo || value > hi {
                Err(SimError::InvalidScenario {
                    field,
                    value,
                    reason,
                })
            } else {
                Ok(())
            }
        };
        check("alt_sht", self.alt_sht, 0.0, MAX_ALT_FT, "altitude outside [0, 65000] ft")?;
        check("alt_tgt", self.alt_tgt, 0.0, MAX_ALT_FT, "altitude outside [0, 65000] ft")?;
        check("vel_sht", self.vel_sht, 1.0, MAX_SPEED_KT, "speed outside [1, 2000] kt")?;
        check("vel_tgt", self.vel_tgt, 1.0, MAX_SPEED_KT, "speed outside [1, 2000] kt")?;
        check("pit_sht", self.pit_sht, -89.0, 89.0, "pitch outside [-89, 89] deg")?;
        check("rgt_tgt", self.rgt_tgt, -90.0, 90.0, "off-boresight outside [-90, 90] deg")?;
        Ok(())
    }
}
