use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetMode {
    NonManeuvering,
    Evasive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvasionPlane {
    Horizontal,
}

/// How the target flies after launch.
///
/// An evasive target turns at constant load factor toward the bearing that
/// points directly away from the missile, then holds that bearing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetPolicy {
    pub mode: TargetMode,
    /// G
    pub evasion_accel: f64,
    /// Seconds after launch before the evasion starts.
    pub evasion_delay: f64,
    pub evasion_plane: EvasionPlane,
}

impl TargetPolicy {
    pub const NEZ_ACCEL_G: f64 = 5.0;

    pub fn non_maneuvering() -> TargetPolicy {
        TargetPolicy {
            mode: TargetMode::NonManeuvering,
            evasion_accel: Self::NEZ_ACCEL_G,
            evasion_delay: 0.0,
            evasion_plane: EvasionPlane::Horizontal,
        }
    }

    pub fn evasive(delay: f64) -> TargetPolicy {
        TargetPolicy {
            mode: TargetMode::Evasive,
            evasion_accel: Self::NEZ_ACCEL_G,
            evasion_delay: delay,
            evasion_plane: EvasionPlane::Horizontal,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.evasion_delay.is_finite() && self.evasion_delay >= 0.0) {
            return Err(SimError::Policy(format!(
                "evasion_delay must be >= 0, got {}",
                self.evasion_delay
            )));
        }
        if !(self.evasion_accel.is_finite() && self.evasion_accel > 0.0) {
            return Err(SimError::Policy(format!(
                "evasion_accel must be positive, got {}",
                self.evasion_accel
            )));
        }
        Ok(())
    }

    pub(crate) fn evading_at(&self, t: f64) -> bool {
        self.mode == TargetMode::Evasive && t >= self.evasion_delay
    }
}

impl Default for TargetPolicy {
    fn default() -> Self {
        Self::non_maneuvering()
    }
}
