use std::io::Write;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::field::fmt_f64;
use crate::algebra::Complex;
use crate::error::{Error, Result};
use crate::planewave::PhysConsts;

/// Time-stamped scalar samples of one observable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(label: impl Into<String>) -> Self {
        ObservableSeries {
            label: label.into(),
            ..Default::default()
        }
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::BadSeries(format!(
                    "{}: time {t} does not follow {last}",
                    self.label
                )));
            }
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes `t,value` rows under a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{},{}", fmt_f64(*t), fmt_f64(*v))?;
        }
        Ok(())
    }
}

/// Least-squares line `value ~ intercept + slope * t`.
pub fn linear_fit(series: &ObservableSeries) -> Result<(f64, f64)> {
    let n = series.len();
    if n < 2 {
        return Err(Error::BadSeries(
            "need at least two samples for a line fit".into(),
        ));
    }
    let nf = n as f64;
    let tm = series.times.iter().sum::<f64>() / nf;
    let vm = series.values.iter().sum::<f64>() / nf;
    let (mut stt, mut stv) = (0.0, 0.0);
    for (t, v) in series.times.iter().zip(&series.values) {
        stt += (t - tm) * (t - tm);
        stv += (t - tm) * (v - vm);
    }
    let slope = stv / stt;
    Ok((vm - slope * tm, slope))
}

/// Options for [`zb_fit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZbFitOptions {
    /// Peak magnitude must exceed this multiple of the median spectral magnitude.
    pub min_peak_ratio: f64,
    /// Amplitudes below this fraction of `hbar / (m c)` count as no oscillation.
    pub min_amplitude_compton: f64,
    /// Minimum number of oscillation periods the series must cover.
    pub min_periods: f64,
}

impl Default for ZbFitOptions {
    fn default() -> Self {
        ZbFitOptions {
            min_peak_ratio: 5.0,
            min_amplitude_compton: 1e-3,
            min_periods: 8.0,
        }
    }
}

/// Result of fitting a drift plus one dominant oscillation to `<x>(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZbFit {
    /// Angular frequency of the dominant spectral peak.
    pub angular_frequency: f64,
    /// Oscillation amplitude, twice the normalized peak coefficient.
    pub amplitude: f64,
    /// Slope of the removed linear trend.
    pub drift_velocity: f64,
    pub intercept: f64,
    pub peak_ratio: f64,
    pub periods: f64,
}

/// Linear detrend, then locate the dominant DFT peak and refine it to a
/// continuous frequency by golden-section search on `|X(omega)|`.
pub fn zb_fit(series: &ObservableSeries, k: &PhysConsts) -> Result<ZbFit> {
    zb_fit_with(series, k, &ZbFitOptions::default())
}

pub fn zb_fit_with(
    series: &ObservableSeries,
    k: &PhysConsts,
    opts: &ZbFitOptions,
) -> Result<ZbFit> {
    let n = series.len();
    if n < 16 || series.values.len() != n {
        return Err(Error::BadSeries(format!(
            "need at least 16 samples, got {n}"
        )));
    }
    let dt = (series.times[n - 1] - series.times[0]) / (n - 1) as f64;
    let uniform = series
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt);
    if !(dt > 0.0 && uniform) {
        return Err(Error::BadSeries(
            "samples must be uniformly spaced in time".into(),
        ));
    }

    let (intercept, slope) = linear_fit(series)?;
    let t0 = series.times[0];
    let residual: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .map(|(t, v)| v - intercept - slope * t)
        .collect();

    let mut spectrum: Vec<Complex> = residual.iter().map(|&r| Complex::new(r, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let half = n / 2;
    let mags: Vec<f64> = spectrum[1..half].iter().map(|z| z.norm()).collect();
    let (peak_off, &peak) = mags
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mut sorted = mags.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let ratio = if median > 0.0 {
        peak / median
    } else {
        f64::INFINITY
    };

    let bin = (peak_off + 1) as f64;
    let d_omega = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let magnitude = |omega: f64| -> f64 {
        residual
            .iter()
            .enumerate()
            .map(|(j, r)| Complex::from_polar(*r, -omega * (series.times[j] - t0)))
            .sum::<Complex>()
            .norm()
    };
    let (mut lo, mut hi) = ((bin - 1.0).max(0.5) * d_omega, (bin + 1.0) * d_omega);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - golden * (hi - lo);
    let mut b = lo + golden * (hi - lo);
    let (mut fa, mut fb) = (magnitude(a), magnitude(b));
    for _ in 0..80 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - golden * (hi - lo);
            fa = magnitude(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + golden * (hi - lo);
            fb = magnitude(b);
        }
    }
    let omega = 0.5 * (lo + hi);
    let amplitude = 2.0 * magnitude(omega) / n as f64;

    let floor = opts.min_amplitude_compton * k.compton_length();
    if ratio < opts.min_peak_ratio || amplitude < floor {
        return Err(Error::NoPeak { ratio, amplitude });
    }
    let span = series.times[n - 1] - t0;
    let periods = omega * span / (2.0 * std::f64::consts::PI);
    if periods < opts.min_periods {
        return Err(Error::BadSeries(format!(
            "series covers only {periods:.2} oscillation periods"
        )));
    }
    Ok(ZbFit {
        angular_frequency: omega,
        amplitude,
        drift_velocity: slope,
        intercept,
        peak_ratio: ratio,
        periods,
    })
}

/// Largest absolute deviation of the series from its least-squares line.
pub fn detrended_max_abs(series: &ObservableSeries) -> Result<f64> {
    let (intercept, slope) = linear_fit(series)?;
    Ok(series
        .times
        .iter()
        .zip(&series.values)
        .map(|(t, v)| (v - intercept - slope * t).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(omega: f64, amp: f64, drift: f64, n: usize, dt: f64) -> ObservableSeries {
        let mut s = ObservableSeries::new("x");
        for j in 0..n {
            let t = j as f64 * dt;
            s.push(t, 0.3 + drift * t + amp * (omega * t + 0.4).sin())
                .unwrap();
        }
        s
    }

    #[test]
    fn recovers_off_bin_sinusoid() {
        let k = PhysConsts::atomic();
        let omega = 2.0 * k.c * k.c;
        let s = synthetic(omega, 1.0 / (2.0 * k.c), 4.0, 3000, 1e-5);
        let fit = zb_fit(&s, &k).unwrap();
        assert!(
            (fit.angular_frequency / omega - 1.0).abs() < 1e-3,
            "{fit:?}"
        );
        assert!((fit.amplitude * 2.0 * k.c - 1.0).abs() < 1e-2, "{fit:?}");
        assert!((fit.drift_velocity - 4.0).abs() < 0.05);
    }

    #[test]
    fn straight_line_has_no_peak() {
        let k = PhysConsts::atomic();
        let s = synthetic(1.0, 0.0, 6.8, 2000, 1e-5);
        assert!(matches!(zb_fit(&s, &k), Err(Error::NoPeak { .. })));
    }

    #[test]
    fn rejects_short_and_nonuniform() {
        let k = PhysConsts::atomic();
        let s = synthetic(1.0, 1.0, 0.0, 8, 1e-3);
        assert!(matches!(zb_fit(&s, &k), Err(Error::BadSeries(_))));
        let mut s = synthetic(1.0, 1.0, 0.0, 64, 1e-3);
        s.times[10] += 3e-4;
        assert!(matches!(zb_fit(&s, &k), Err(Error::BadSeries(_))));
    }

    #[test]
    fn push_requires_increasing_time() {
        let mut s = ObservableSeries::new("x");
        s.push(0.0, 1.0).unwrap();
        assert!(s.push(0.0, 2.0).is_err());
    }

    #[test]
    fn series_csv() {
        let mut s = ObservableSeries::new("x");
        s.push(0.0, 1.5).unwrap();
        s.push(0.25, -2.0).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "t,value\n0.0000000000000000e0,1.5000000000000000e0\n2.5000000000000000e-1,-2.0000000000000000e0\n"
        );
    }
}
