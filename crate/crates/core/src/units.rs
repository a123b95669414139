//! Unit conversions between the external units (ft, kt, deg, NM) and SI.

pub const FT_TO_M: f64 = 0.3048;
pub const KT_TO_MPS: f64 = 0.514444;
pub const NM_TO_M: f64 = 1852.0;
/// Standard gravity (m/s²).
pub const G0: f64 = 9.80665;

#[inline]
pub fn ft_to_m(ft: f64) -> f64 {
    ft * FT_TO_M
}

#[inline]
pub fn m_to_ft(m: f64) -> f64 {
    m / FT_TO_M
}

#[inline]
pub fn kt_to_mps(kt: f64) -> f64 {
    kt * KT_TO_MPS
}

#[inline]
pub fn nm_to_m(nm: f64) -> f64 {
    nm * NM_TO_M
}

#[inline]
pub fn m_to_nm(m: f64) -> f64 {
    m / NM_TO_M
}

/// Wraps an angle in degrees into (-180, 180].
pub fn wrap_deg(angle: f64) -> f64 {
    let mut a = angle % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// Wraps an angle in radians into (-π, π].
pub fn wrap_rad(angle: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = angle % TAU;
    if a <= -PI {
        a += TAU;
    } else if a > PI {
        a -= TAU;
    }
    a
}

/// Fixed-point rendering that rounds the shortest round-trip decimal form of
/// `x` half away from zero, so `33.275` renders as `33.28` even though the
/// nearest double lies just below it.
pub fn format_fixed(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let text = format!("{}", x.abs());
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let mut digits: Vec<u8> = int.bytes().chain(frac.bytes().chain(std::iter::repeat(b'0')).take(decimals)).collect();
    if frac.len() > decimals && frac.as_bytes()[decimals] >= b'5' {
        let mut k = digits.len();
        loop {
            if k == 0 {
                digits.insert(0, b'1');
                break;
            }
            k -= 1;
            if digits[k] == b'9' {
                digits[k] = b'0';
            } else {
                digits[k] += 1;
                break;
            }
        }
    }
    let split = digits.len() - decimals;
    let mut out = String::new();
    if x.is_sign_negative() && digits.iter().any(|&d| d != b'0') {
        out.push('-');
    }
    out.push_str(std::str::from_utf8(&digits[..split]).expect("ascii digits"));
    if decimals > 0 {
        out.push('.');
        out.push_str(std::str::from_utf8(&digits[split..]).expect("ascii digits"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_rounds_the_written_value() {
        assert_eq!(format_fixed(16.64 + 1.5 * (16.64 - 5.55), 2), "33.28");
        assert_eq!(format_fixed(12.38, 2), "12.38");
        assert_eq!(format_fixed(9.995, 2), "10.00");
        assert_eq!(format_fixed(-0.125, 2), "-0.13");
        assert_eq!(format_fixed(-0.001, 2), "0.00");
        assert_eq!(format_fixed(7.0, 0), "7");
        assert_eq!(format_fixed(99.5, 0), "100");
        assert_eq!(format_fixed(1e-7, 3), "0.000");
        assert_eq!(format_fixed(2.5, 3), "2.500");
    }

    #[test]
    fn wrap_deg_is_half_open() {
        assert_eq!(wrap_deg(-180.0), 180.0);
        assert_eq!(wrap_deg(180.0), 180.0);
        assert_eq!(wrap_deg(540.0), 180.0);
        assert_eq!(wrap_deg(-190.0), 170.0);
        assert_eq!(wrap_deg(0.0), 0.0);
    }

    #[test]
    fn nautical_mile_round_trip() {
        assert_eq!(m_to_nm(nm_to_m(12.5)), 12.5);
        assert!((m_to_nm(2000.0) - 1.0799).abs() < 1e-4);
    }
}
