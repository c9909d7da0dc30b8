use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planewave::PhysConsts;

/// Uniform periodic grid on `[x_min, x_max)` with a power-of-two point count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid1D {
    n: usize,
    x_min: f64,
    x_max: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    n: usize,
    x_min: f64,
    x_max: f64,
}

impl TryFrom<GridRepr> for Grid1D {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        Grid1D::new(r.n, r.x_min, r.x_max)
    }
}

impl From<Grid1D> for GridRepr {
    fn from(g: Grid1D) -> Self {
        GridRepr {
            n: g.n,
            x_min: g.x_min,
            x_max: g.x_max,
        }
    }
}

impl Grid1D {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidGrid(format!(
                "need finite x_max > x_min, got [{x_min}, {x_max})"
            )));
        }
        Ok(Grid1D { n, x_min, x_max })
    }

    /// Grid of `n` points on `[-length/2, length/2)`.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        Self::new(n, -0.5 * length, 0.5 * length)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.x(j))
    }

    /// Index of the grid point nearest to `x` (no wrapping).
    pub fn index_of(&self, x: f64) -> usize {
        (((x - self.x_min) / self.dx()).round().max(0.0) as usize).min(self.n - 1)
    }

    /// Momentum of FFT bin `m` (standard ordering: 0, 1, .., n/2-1, -n/2, .., -1).
    pub fn momentum(&self, m: usize, k: &PhysConsts) -> f64 {
        let n = self.n as i64;
        let m = m as i64;
        let signed = if m < n / 2 { m } else { m - n };
        k.hbar * 2.0 * PI * signed as f64 / self.length()
    }

    pub fn momenta(&self, k: &PhysConsts) -> Vec<f64> {
        (0..self.n).map(|m| self.momentum(m, k)).collect()
    }

    /// Largest representable momentum `pi hbar / dx`.
    pub fn momentum_cutoff(&self, k: &PhysConsts) -> f64 {
        PI * k.hbar / self.dx()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid1D::new(4, 0.0, 1.0).is_err());
        assert!(Grid1D::new(100, 0.0, 1.0).is_err());
        assert!(Grid1D::new(64, 1.0, 1.0).is_err());
        assert!(Grid1D::new(64, 0.0, 1.0).is_ok());
    }

    #[test]
    fn momentum_ordering() {
        let k = PhysConsts::atomic();
        let g = Grid1D::centered(8, 2.0 * PI).unwrap();
        let p = g.momenta(&k);
        assert_eq!(p, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        assert!((g.momentum_cutoff(&k) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn serde_validates() {
        let bad: std::result::Result<Grid1D, _> =
            serde_json::from_str(r#"{"n": 12, "x_min": 0, "x_max": 1}"#);
        assert!(bad.is_err());
        let ok: Grid1D = serde_json::from_str(r#"{"n": 16, "x_min": -1, "x_max": 1}"#).unwrap();
        assert_eq!(ok.dx(), 0.125);
    }
}
