//! Off-boresight sweep of the surrogate and its polar SVG rendering.

use std::fmt::Write as _;
use std::io::Write;

use wez_core::sim::Scenario;
use wez_core::surrogate::{MlpModel, SurrogateError};

pub const SWEEP_START_DEG: f64 = -60.0;
pub const SWEEP_STEP_DEG: f64 = 0.5;
pub const SWEEP_POINTS: usize = 241;
pub const SWEEP_CSV_HEADER: &str = "rgt_deg,max_range_nm";

/// Range rings are drawn every this many NM.
const RING_STEP_NM: f64 = 5.0;
const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const ORIGIN: (f64, f64) = (360.0, 400.0);
const RADIUS_PX: f64 = 360.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub base: Scenario,
    /// `(off-boresight deg, predicted max range NM)`, off-boresight increasing.
    pub points: Vec<(f64, f64)>,
}

/// Off-boresight angles of the sweep.
pub fn sweep_angles() -> Vec<f64> {
    (0..SWEEP_POINTS)
        .map(|i| SWEEP_START_DEG + SWEEP_STEP_DEG * i as f64)
        .collect()
}

/// Predicted maximum range over the sweep with every other field taken from
/// `base`. Negative predictions are clamped to zero.
pub fn sweep(model: &MlpModel, base: &Scenario) -> Result<SweepResult, SurrogateError> {
    let angles = sweep_angles();
    let rows: Vec<Scenario> = angles
        .iter()
        .map(|&rgt_tgt| Scenario { rgt_tgt, ..*base })
        .collect();
    let ranges = model.predict_many(&rows)?;
    Ok(SweepResult {
        base: *base,
        points: angles.into_iter().zip(ranges.into_iter().map(|r| r.max(0.0))).collect(),
    })
}

impl SweepResult {
    /// Largest change in range between neighbouring angles (NM).
    pub fn max_jump(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{SWEEP_CSV_HEADER}")?;
        for (deg, r) in &self.points {
            writeln!(w, "{deg},{r}")?;
        }
        Ok(())
    }

    /// SVG 1.1 polar plot: shooter at the bottom centre, boresight up, range
    /// rings every 5 NM and the max-range curve over the swept sector.
    pub fn to_svg(&self) -> String {
        let peak = self.points.iter().map(|p| p.1).fold(0.0, f64::max);
        let outer = ((peak / RING_STEP_NM).ceil() * RING_STEP_NM).max(RING_STEP_NM);
        let scale = RADIUS_PX / outer;
        let (ox, oy) = ORIGIN;
        let at = |deg: f64, nm: f64| {
            let (s, c) = deg.to_radians().sin_cos();
            (ox + nm * scale * s, oy - nm * scale * c)
        };
        let b = &self.base;

        let mut svg = String::new();
        let mut line = |s: String| {
            svg.push_str(&s);
            svg.push('\n');
        };
        line(r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#.into());
        line(
            r#"<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">"#
                .into(),
        );
        line(format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        ));
        line("<title>WEZ maximum launch range</title>".into());
        line(format!(
            "<desc>alt_sht {} ft, vel_sht {} kt, pit_sht {} deg, alt_tgt {} ft, vel_tgt {} kt, hdg_tgt {} deg; \
             rgt_tgt swept from -60 to 60 deg</desc>",
            b.alt_sht, b.vel_sht, b.pit_sht, b.alt_tgt, b.vel_tgt, b.hdg_tgt
        ));
        line(format!(r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#08140c"/>"##));

        line(r##"<g id="rings" fill="none" stroke="#2e6b3c" stroke-width="1">"##.into());
        let n_rings = (outer / RING_STEP_NM).round() as usize;
        for k in 1..=n_rings {
            let r = k as f64 * RING_STEP_NM;
            let (x0, y0) = at(SWEEP_START_DEG, r);
            let (x1, y1) = at(-SWEEP_START_DEG, r);
            let rp = r * scale;
            line(format!(r#"<path d="M {x0:.2} {y0:.2} A {rp:.2} {rp:.2} 0 0 1 {x1:.2} {y1:.2}"/>"#));
        }
        for deg in [SWEEP_START_DEG, 0.0, -SWEEP_START_DEG] {
            let (x, y) = at(deg, outer);
            let dash = if deg == 0.0 { r#" stroke-dasharray="4 4""# } else { "" };
            line(format!(r#"<line x1="{ox:.2}" y1="{oy:.2}" x2="{x:.2}" y2="{y:.2}"{dash}/>"#));
        }
        line("</g>".into());

        line(r##"<g id="ring-labels" fill="#7fbf8a" font-family="monospace" font-size="11">"##.into());
        for k in 1..=n_rings {
            let r = k as f64 * RING_STEP_NM;
            let (x, y) = at(0.0, r);
            line(format!(r#"<text x="{:.2}" y="{:.2}">{r}</text>"#, x + 3.0, y + 12.0));
        }
        line("</g>".into());

        let mut d = String::new();
        for (i, &(deg, r)) in self.points.iter().enumerate() {
            let (x, y) = at(deg, r);
            let _ = write!(d, "{}{x:.2} {y:.2}", if i == 0 { "M " } else { " L " });
        }
        line(format!(
            r##"<path id="max-range" d="{d}" fill="none" stroke="#52ff73" stroke-width="2"/>"##
        ));
        line(format!(r##"<circle id="shooter" cx="{ox:.2}" cy="{oy:.2}" r="4" fill="#52ff73"/>"##));
        line(format!(
            r##"<text x="10" y="20" fill="#7fbf8a" font-family="monospace" font-size="12">Rmax (NM), rings every {RING_STEP_NM} NM</text>"##
        ));
        line("</svg>".into());
        svg
    }
}
