//! International Standard Atmosphere, troposphere and lower stratosphere.

use super::SimError;
use crate::units::G0;

/// Sea-level density (kg/m³).
pub const RHO0: f64 = 1.225;
const T0: f64 = 288.15;
const LAPSE: f64 = 0.0065;
const R_AIR: f64 = 287.052_87;
const GAMMA_AIR: f64 = 1.4;
const TROPOPAUSE: f64 = 11_000.0;
const T_TROPOPAUSE: f64 = T0 - LAPSE * TROPOPAUSE;
/// Upper altitude limit of the public density function (m).
pub const MAX_ALTITUDE: f64 = 20_000.0;

/// ISA density at geometric altitude `alt` (m), valid on [0, 20 000] m.
pub fn atmosphere_density(alt: f64) -> Result<f64, SimError> {
    if !alt.is_finite() || !(0.0..=MAX_ALTITUDE).contains(&alt) {
        return Err(SimError::OutOfDomain {
            quantity: "altitude (m)",
            value: alt,
        });
    }
    Ok(Air::at(alt).density)
}

/// Local air properties used by the flight model.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Air {
    pub density: f64,
    pub speed_of_sound: f64,
}

impl Air {
    /// Unchecked evaluation. Below sea level the sea-level state is used; above the
    /// tropopause the isothermal layer is continued, which also covers lofted
    /// trajectories that briefly climb over 20 km.
    pub fn at(alt: f64) -> Air {
        let h = alt.max(0.0);
        let (t, rho) = if h <= TROPOPAUSE {
            let t = T0 - LAPSE * h;
            (t, RHO0 * (t / T0).powf(G0 / (LAPSE * R_AIR) - 1.0))
        } else {
            let rho11 = RHO0 * (T_TROPOPAUSE / T0).powf(G0 / (LAPSE * R_AIR) - 1.0);
            (
                T_TROPOPAUSE,
                rho11 * (-G0 * (h - TROPOPAUSE) / (R_AIR * T_TROPOPAUSE)).exp(),
            )
        };
        Air {
            density: rho,
            speed_of_sound: (GAMMA_AIR * R_AIR * t).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sea_level_density() {
        assert!((atmosphere_density(0.0).unwrap() - 1.225).abs() < 1e-12);
    }

    #[test]
    fn tropopause_density() {
        // closed form: 1.225 * (216.65 / 288.15)^4.25588 = 0.36392
        let rho = atmosphere_density(11_000.0).unwrap();
        assert!((rho - 0.3639).abs() < 5e-4, "{rho}");
    }

    #[test]
    fn continuous_at_tropopause() {
        let below = Air::at(TROPOPAUSE - 1e-6).density;
        let above = Air::at(TROPOPAUSE + 1e-6).density;
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(
            atmosphere_density(20_000.1),
            Err(SimError::OutOfDomain { .. })
        ));
        assert!(atmosphere_density(-1.0).is_err());
        assert!(atmosphere_density(f64::NAN).is_err());
        assert!(atmosphere_density(20_000.0).is_ok());
    }

    #[test]
    fn speed_of_sound_sea_level() {
        assert!((Air::at(0.0).speed_of_sound - 340.294).abs() < 0.01);
    }

    proptest::proptest! {
        #[test]
        fn density_monotone(a in 0.0..20_000.0f64, b in 0.0..20_000.0f64) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            proptest::prop_assert!(atmosphere_density(lo).unwrap() >= atmosphere_density(hi).unwrap());
        }
    }
}
