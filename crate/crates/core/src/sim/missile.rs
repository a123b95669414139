use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SimError;

/// One knot of the zero-lift drag table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachCd {
    pub mach: f64,
    pub cd: f64,
}

/// When the loft phase applies and when it ends.
///
/// The pitch bias is zero up to `min_range` and reaches the full
/// `MissileConfig::loft_pitch_bias` at `full_bias_range`, interpolating linearly
/// in between. Setting both to the same value gives a hard switch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoftCutoff {
    /// Initial horizontal range (NM) below which no loft is flown.
    pub min_range: f64,
    /// Initial horizontal range (NM) at which the full bias applies.
    pub full_bias_range: f64,
    /// Fraction of the initial horizontal range covered before the loft ends.
    pub cover_fraction: f64,
    /// Altitude (m) at which the loft ends regardless of distance covered.
    pub apogee_altitude: f64,
    /// Time constant (s) of the flight-path-angle tracking loop during loft.
    pub time_constant: f64,
}

impl Default for LoftCutoff {
    fn default() -> Self {
        LoftCutoff {
            min_range: 10.0,
            full_bias_range: 20.0,
            cover_fraction: 0.4,
            apogee_altitude: 18_000.0,
            time_constant: 1.0,
        }
    }
}

/// Missile airframe, motor and guidance parameters. Units are SI except where
/// noted (G, deg).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissileConfig {
    /// kg
    pub launch_mass: f64,
    /// N
    pub boost_thrust: f64,
    /// s
    pub boost_duration: f64,
    /// N
    pub sustain_thrust: f64,
    /// s
    pub sustain_duration: f64,
    /// kg
    pub propellant_mass_boost: f64,
    /// kg
    pub propellant_mass_sustain: f64,
    /// Zero-lift drag coefficient against Mach, sorted by Mach; linear in between,
    /// clamped outside.
    pub drag_coefficient_table: Vec<MachCd>,
    /// m²
    pub reference_area: f64,
    pub nav_gain: f64,
    /// G
    pub max_lateral_accel: f64,
    /// deg
    pub seeker_gimbal_limit: f64,
    /// Distance (m) the missile must fly before its seeker and fuze are active.
    pub activation_distance: f64,
    /// deg
    pub loft_pitch_bias: f64,
    pub loft_cutoff: LoftCutoff,
    /// m
    pub hit_radius: f64,
    /// s
    pub max_flight_time: f64,
    /// Speed (m/s) below which the missile is considered out of energy.
    pub stall_speed: f64,
    /// Normal-force slope (1/rad), used for angle of attack and induced drag.
    pub normal_force_slope: f64,
    /// deg
    pub max_angle_of_attack: f64,
    /// Integration step (s).
    pub time_step: f64,
}

impl Default for MissileConfig {
    fn default() -> Self {
        MissileConfig {
            launch_mass: 152.0,
            boost_thrust: 11_000.0,
            boost_duration: 6.0,
            sustain_thrust: 2_600.0,
            sustain_duration: 20.0,
            propellant_mass_boost: 45.0,
            propellant_mass_sustain: 20.0,
            drag_coefficient_table: vec![
                MachCd { mach: 0.8, cd: 0.35 },
                MachCd { mach: 1.2, cd: 0.55 },
                MachCd { mach: 2.0, cd: 0.40 },
                MachCd { mach: 4.0, cd: 0.30 },
            ],
            reference_area: 0.06,
            nav_gain: 4.0,
            max_lateral_accel: 40.0,
            seeker_gimbal_limit: 60.0,
            activation_distance: 2_000.0,
            loft_pitch_bias: 20.0,
            loft_cutoff: LoftCutoff::default(),
            hit_radius: 50.0,
            max_flight_time: 200.0,
            stall_speed: 150.0,
            normal_force_slope: 25.0,
            max_angle_of_attack: 25.0,
            time_step: 0.01,
        }
    }
}

impl MissileConfig {
    pub fn from_json_file(path: &Path) -> Result<MissileConfig, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        let cfg: MissileConfig = serde_json::from_str(&text)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("launch_mass", self.launch_mass),
            ("boost_thrust", self.boost_thrust),
            ("boost_duration", self.boost_duration),
            ("sustain_thrust", self.sustain_thrust),
            ("sustain_duration", self.sustain_duration),
            ("propellant_mass_boost", self.propellant_mass_boost),
            ("propellant_mass_sustain", self.propellant_mass_sustain),
            ("reference_area", self.reference_area),
            ("nav_gain", self.nav_gain),
            ("max_lateral_accel", self.max_lateral_accel),
            ("activation_distance", self.activation_distance),
            ("hit_radius", self.hit_radius),
            ("max_flight_time", self.max_flight_time),
            ("stall_speed", self.stall_speed),
            ("normal_force_slope", self.normal_force_slope),
            ("max_angle_of_attack", self.max_angle_of_attack),
            ("time_step", self.time_step),
            ("loft_cutoff.time_constant", self.loft_cutoff.time_constant),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.propellant_mass_boost + self.propellant_mass_sustain >= self.launch_mass {
            return Err(SimError::Config(
                "propellant mass must be smaller than the launch mass".into(),
            ));
        }
        if !(self.seeker_gimbal_limit >= 60.0 && self.seeker_gimbal_limit < 180.0) {
            return Err(SimError::Config(format!(
                "seeker_gimbal_limit must be in [60, 180) deg, got {}",
                self.seeker_gimbal_limit
            )));
        }
        if !self.loft_pitch_bias.is_finite() || self.loft_pitch_bias < 0.0 {
            return Err(SimError::Config("loft_pitch_bias must be >= 0".into()));
        }
        let lc = &self.loft_cutoff;
        if !(lc.min_range >= 0.0 && lc.full_bias_range >= lc.min_range) {
            return Err(SimError::Config(
                "loft_cutoff requires 0 <= min_range <= full_bias_range".into(),
            ));
        }
        if !(lc.cover_fraction > 0.0 && lc.cover_fraction <= 1.0) || !lc.apogee_altitude.is_finite() {
            return Err(SimError::Config(
                "loft_cutoff.cover_fraction must be in (0, 1] and apogee_altitude finite".into(),
            ));
        }
        let table = &self.drag_coefficient_table;
        if table.is_empty() {
            return Err(SimError::Config("drag_coefficient_table is empty".into()));
        }
        if table
            .iter()
            .any(|k| !(k.mach.is_finite() && k.mach >= 0.0 && k.cd.is_finite() && k.cd > 0.0))
        {
            return Err(SimError::Config(
                "drag table entries need finite mach >= 0 and cd > 0".into(),
            ));
        }
        if table.windows(2).any(|w| w[1].mach <= w[0].mach) {
            return Err(SimError::Config(
                "drag table must be strictly increasing in Mach".into(),
            ));
        }
        Ok(())
    }

    /// Zero-lift drag coefficient.
    pub fn cd0(&self, mach: f64) -> f64 {
        let t = &self.drag_coefficient_table;
        if mach <= t[0].mach {
            return t[0].cd;
        }
        for w in t.windows(2) {
            if mach <= w[1].mach {
                let f = (mach - w[0].mach) / (w[1].mach - w[0].mach);
                return w[0].cd + f * (w[1].cd - w[0].cd);
            }
        }
        t[t.len() - 1].cd
    }

    pub fn burnout_time(&self) -> f64 {
        self.boost_duration + self.sustain_duration
    }

    pub fn thrust(&self, t: f64) -> f64 {
        if t < self.boost_duration {
            self.boost_thrust
        } else if t < self.burnout_time() {
            self.sustain_thrust
        } else {
            0.0
        }
    }

    /// Mass at time `t`; each phase burns its propellant at a constant rate.
    pub fn mass(&self, t: f64) -> f64 {
        let boost = (t / self.boost_duration).clamp(0.0, 1.0) * self.propellant_mass_boost;
        let sustain = ((t - self.boost_duration) / self.sustain_duration).clamp(0.0, 1.0)
            * self.propellant_mass_sustain;
        self.launch_mass - boost - sustain
    }

    /// Loft pitch bias (rad) for a given initial horizontal range (NM).
    pub fn loft_bias(&self, initial_range_nm: f64) -> f64 {
        let lc = &self.loft_cutoff;
        let frac = if initial_range_nm <= lc.min_range {
            0.0
        } else if initial_range_nm >= lc.full_bias_range {
            1.0
        } else {
            (initial_range_nm - lc.min_range) / (lc.full_bias_range - lc.min_range)
        };
        frac * self.loft_pitch_bias.to_radians()
    }

    /// Stable hex digest of the configuration, used in dataset metadata.
    pub fn config_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}
