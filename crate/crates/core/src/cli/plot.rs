//! Minimal self-contained SVG output: line plots and grayscale heatmaps.

use std::fmt::Write;

use crate::dynamics::ObservableSeries;
use crate::error::{Error, Result};
use crate::pairsim::JointDensity;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 56.0;
const PALETTE: [&str; 4] = ["#1f3b73", "#b5402a", "#2e7d32", "#6a1b9a"];

/// One named polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl From<&ObservableSeries> for Curve {
    fn from(s: &ObservableSeries) -> Self {
        Curve {
            label: s.label.clone(),
            xs: s.times.clone(),
            ys: s.values.clone(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 - f * (y0 - y1);
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{:.3e}</text>"#,
            y0 + 16.0,
            x.0 + f * (x.1 - x.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3e}</text>"#,
            x0 - 4.0,
            py + 4.0,
            y.0 + f * (y.1 - y.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

/// Line plot of one or more curves sharing axes.
pub fn line_svg(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> Result<String> {
    if curves.iter().all(|c| c.xs.is_empty()) {
        return Err(Error::EmptyData);
    }
    let xr = range(curves.iter().flat_map(|c| c.xs.iter().copied()));
    let yr = range(curves.iter().flat_map(|c| c.ys.iter().copied()));
    let sx = |x: f64| MARGIN_L + (x - xr.0) / (xr.1 - xr.0) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy =
        |y: f64| HEIGHT - MARGIN_B - (y - yr.0) / (yr.1 - yr.0) * (HEIGHT - MARGIN_B - MARGIN_T);

    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xr, yr, x_label, y_label);
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in c.xs.iter().zip(&c.ys) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            points.trim_end()
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            MARGIN_L + 8.0,
            MARGIN_T + 16.0 + 14.0 * i as f64,
            escape(&c.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Grayscale heatmap of `joint` (dark = large), electron coordinate on the
/// horizontal axis.
pub fn heatmap_svg(title: &str, joint: &JointDensity, x_min: f64, y_min: f64) -> Result<String> {
    if joint.values.is_empty() || joint.nx == 0 || joint.ny == 0 {
        return Err(Error::EmptyData);
    }
    let max = joint.values.iter().copied().fold(0.0, f64::max);
    let xr = (x_min, x_min + joint.nx as f64 * joint.dx);
    let yr = (y_min, y_min + joint.ny as f64 * joint.dy);
    let cw = (WIDTH - MARGIN_L - MARGIN_R) / joint.nx as f64;
    let ch = (HEIGHT - MARGIN_B - MARGIN_T) / joint.ny as f64;

    let mut out = String::new();
    header(&mut out, title);
    for ix in 0..joint.nx {
        for iy in 0..joint.ny {
            let v = if max > 0.0 {
                joint.at(ix, iy) / max
            } else {
                0.0
            };
            let g = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({g},{g},{g})"/>"#,
                MARGIN_L + ix as f64 * cw,
                HEIGHT - MARGIN_B - (iy + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut out, xr, yr, "electron x (a.u.)", "positron y (a.u.)");
    out.push_str("</svg>\n");
    Ok(out)
}
