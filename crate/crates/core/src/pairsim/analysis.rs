use serde::{Deserialize, Serialize};

use super::{pair_mode_sum_series, ModeSumConfig, PairDensities, PotentialSpec};
use crate::dynamics::fmt_f64;
use crate::error::{Error, Result};
use crate::planewave::PhysConsts;

/// Peak densities below this many particles per box length count as empty.
pub const VACUUM_FLOOR: f64 = 1e-12;

/// Peak-finding thresholds for [`detect_satellites_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteOptions {
    /// Peaks below this fraction of the global maximum are ignored.
    pub threshold: f64,
    /// Minimum distance between accepted peaks, in grid points.
    pub min_separation_points: usize,
}

impl Default for SatelliteOptions {
    fn default() -> Self {
        SatelliteOptions {
            threshold: 0.05,
            min_separation_points: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatelliteReport {
    pub main_peak_x: f64,
    /// Ordered by distance from the main peak.
    pub satellite_xs: Vec<f64>,
    /// Distance from the main peak to the nearest satellite.
    pub separation: f64,
    /// Lowest density between the main peak and the nearest satellite over the main peak density.
    pub gap_depth: f64,
    pub time: f64,
}

impl SatelliteReport {
    /// Distance from the main peak to the farthest satellite.
    pub fn outer_separation(&self) -> f64 {
        self.satellite_xs
            .iter()
            .map(|x| (x - self.main_peak_x).abs())
            .fold(0.0, f64::max)
    }
}

/// Sub-grid peak position from a parabola through `ln rho` (exact for a
/// Gaussian), falling back to a parabola through `rho`.
fn refine_peak(rho: &[f64], j: usize, x: f64, dx: f64) -> f64 {
    if j == 0 || j + 1 >= rho.len() {
        return x;
    }
    let (a, b, c) = (rho[j - 1], rho[j], rho[j + 1]);
    let vertex = |l: f64, m: f64, r: f64| {
        let den = l - 2.0 * m + r;
        if den < 0.0 {
            (0.5 * (l - r) / den).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    };
    let off = if a > 0.0 && b > 0.0 && c > 0.0 {
        vertex(a.ln(), b.ln(), c.ln())
    } else {
        vertex(a, b, c)
    };
    x + off * dx
}

pub fn detect_satellites(d: &PairDensities) -> Result<SatelliteReport> {
    detect_satellites_with(d, &SatelliteOptions::default())
}

/// Finds the main created-electron peak and its satellites in `d.rho_e`.
pub fn detect_satellites_with(
    d: &PairDensities,
    opts: &SatelliteOptions,
) -> Result<SatelliteReport> {
    let rho = &d.rho_e;
    let no_structure = || Error::NoStructure { time: d.time };
    let global = rho.iter().copied().fold(0.0, f64::max);
    // roundoff-level densities (the stationary vacuum) carry no structure
    if !(global * d.grid.length() > VACUUM_FLOOR) {
        return Err(no_structure());
    }
    let floor = opts.threshold * global;
    let n = rho.len();
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&j| {
            let left = if j > 0 { rho[j - 1] } else { f64::NEG_INFINITY };
            let right = if j + 1 < n {
                rho[j + 1]
            } else {
                f64::NEG_INFINITY
            };
            rho[j] >= floor && rho[j] >= left && rho[j] > right
        })
        .collect();
    candidates.sort_by(|&a, &b| rho[b].total_cmp(&rho[a]).then(a.cmp(&b)));
    let mut peaks: Vec<usize> = Vec::new();
    for j in candidates {
        if peaks
            .iter()
            .all(|&p| p.abs_diff(j) >= opts.min_separation_points)
        {
            peaks.push(j);
        }
    }
    if peaks.len() < 2 {
        return Err(no_structure());
    }
    let main = peaks[0];
    let mut sats = peaks[1..].to_vec();
    sats.sort_by_key(|&j| (j.abs_diff(main), j));
    let nearest = sats[0];
    let (lo, hi) = (main.min(nearest), main.max(nearest));
    let valley = rho[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);

    let dx = d.grid.dx();
    let at = |j: usize| refine_peak(rho, j, d.grid.x(j), dx);
    let main_peak_x = at(main);
    let satellite_xs: Vec<f64> = sats.iter().map(|&j| at(j)).collect();
    Ok(SatelliteReport {
        main_peak_x,
        separation: (satellite_xs[0] - main_peak_x).abs(),
        satellite_xs,
        gap_depth: (valley / rho[main]).clamp(0.0, 1.0),
        time: d.time,
    })
}

/// Mean speed of a separation `span` covered in `elapsed` time.
pub fn speed_from_span(span: f64, elapsed: f64) -> f64 {
    span / elapsed
}

/// Least-squares slope of the outermost-satellite separation against time.
pub fn satellite_speed(runs: &[PairDensities]) -> Result<f64> {
    satellite_speed_with(runs, &SatelliteOptions::default())
}

pub fn satellite_speed_with(runs: &[PairDensities], opts: &SatelliteOptions) -> Result<f64> {
    if runs.len() < 3 {
        return Err(Error::BadSeries(format!(
            "need at least 3 time samples, got {}",
            runs.len()
        )));
    }
    let mut series = crate::dynamics::ObservableSeries::new("outer_separation");
    for d in runs {
        let report = detect_satellites_with(d, opts)?;
        series.push(d.time, report.outer_separation())?;
    }
    Ok(crate::dynamics::linear_fit(&series)?.1)
}

/// Which potential parameter a scan varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "vary", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldScan {
    /// Step heights at a fixed width.
    Strength { v0s: Vec<f64>, width: f64 },
    /// Step widths at a fixed height, in the order given (normally decreasing).
    Width { widths: Vec<f64>, v0: f64 },
}

impl FieldScan {
    fn points(&self) -> Vec<(f64, f64, f64)> {
        match self {
            FieldScan::Strength { v0s, width } => v0s.iter().map(|&v| (v, v, *width)).collect(),
            FieldScan::Width { widths, v0 } => widths.iter().map(|&w| (w, *v0, w)).collect(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FieldScan::Strength { .. } => "v0",
            FieldScan::Width { .. } => "width",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    /// The varied parameter (V0 or W).
    pub parameter: f64,
    pub v0: f64,
    pub width: f64,
    pub separation: f64,
    /// `hbar c / (2 (m c^2 + V0 / 2))`.
    pub predicted: f64,
    pub gap_depth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    pub label: String,
    pub time: f64,
    pub rows: Vec<AmplitudeRow>,
}

impl AmplitudeTable {
    /// Whether separations never grow along the scan by more than `slack`.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].separation <= w[0].separation + slack)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "parameter,v0,width,separation,predicted,gap_depth")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_f64(r.parameter),
                fmt_f64(r.v0),
                fmt_f64(r.width),
                fmt_f64(r.separation),
                fmt_f64(r.predicted),
                fmt_f64(r.gap_depth)
            )?;
        }
        Ok(())
    }
}

/// Predicted zitterbewegung amplitude `hbar c / (2 E_eff)` with `E_eff = m c^2 + V0 / 2`.
pub fn predicted_amplitude(v0: f64, k: &PhysConsts) -> f64 {
    k.hbar * k.c / (2.0 * (k.rest_energy() + 0.5 * v0))
}

/// Satellite separation at time `t` for each point of `scan`, using `base` for
/// everything but the potential.
pub fn amplitude_vs_field(
    base: &ModeSumConfig,
    scan: &FieldScan,
    t: f64,
    k: &PhysConsts,
    opts: &SatelliteOptions,
) -> Result<AmplitudeTable> {
    let points = scan.points();
    if points.len() < 3 {
        return Err(Error::config(
            "scan",
            format!("needs at least 3 points, got {}", points.len()),
        ));
    }
    let critical = 2.0 * k.rest_energy();
    let mut rows = Vec::with_capacity(points.len());
    for (parameter, v0, width) in points {
        if !(v0 > critical) {
            return Err(Error::InvalidPotential(format!(
                "scan requires supercritical V0 > 2 m c^2 = {critical}, got {v0}"
            )));
        }
        let cfg = ModeSumConfig {
            potential: PotentialSpec::TanhStep { v0, width },
            joint: false,
            ..base.clone()
        };
        let d = pair_mode_sum_series(&cfg, &[t], k)?
            .pop()
            .expect("one sample");
        let report = detect_satellites_with(&d, opts)?;
        rows.push(AmplitudeRow {
            parameter,
            v0,
            width,
            separation: report.separation,
            predicted: predicted_amplitude(v0, k),
            gap_depth: report.gap_depth,
        });
    }
    Ok(AmplitudeTable {
        label: scan.label().to_string(),
        time: t,
        rows,
    })
}
