use serde::{Deserialize, Serialize};

use crate::dynamics::Grid1D;
use crate::error::{Error, Result};

/// Fraction of the box between each edge and the centre of the edge taper.
pub const EDGE_TAPER_OFFSET: f64 = 1.0 / 8.0;
/// Width of the edge taper as a fraction of the box length.
pub const EDGE_TAPER_WIDTH: f64 = 1.0 / 40.0;

/// Scalar potential energy switched on suddenly at `t = 0` and static afterwards.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Zero,
    /// `V0 [tanh(x / W) + 1] / 2`.
    TanhStep { v0: f64, width: f64 },
    /// One value per grid point.
    Table { values: Vec<f64> },
}

/// `V0 [tanh(x / W) + 1] / 2`.
pub fn tanh_potential(x: f64, v0: f64, width: f64) -> f64 {
    debug_assert!(width > 0.0);
    0.5 * v0 * ((x / width).tanh() + 1.0)
}

fn smooth_window(x: f64, lo: f64, hi: f64, width: f64) -> f64 {
    0.25 * (1.0 + ((x - lo) / width).tanh()) * (1.0 - ((x - hi) / width).tanh())
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::TanhStep { v0, width } => {
                if !v0.is_finite() {
                    return Err(Error::InvalidPotential(format!(
                        "V0 must be finite, got {v0}"
                    )));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::InvalidPotential(format!(
                        "W must be positive, got {width}"
                    )));
                }
                Ok(())
            }
            PotentialSpec::Table { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPotential(
                        "table contains non-finite values".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PotentialSpec::Zero => true,
            PotentialSpec::TanhStep { v0, .. } => *v0 == 0.0,
            PotentialSpec::Table { values } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// Potential sampled on a periodic grid.
    ///
    /// A tanh step does not return to its left value across the periodic seam,
    /// so it is multiplied by a smooth window that falls to zero near both
    /// edges. The window is far wider than the Compton length, which keeps the
    /// seam from acting as a second pair source.
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            PotentialSpec::Zero => Ok(vec![0.0; grid.n()]),
            PotentialSpec::TanhStep { v0, width } => {
                let len = grid.length();
                let lo = grid.x_min() + EDGE_TAPER_OFFSET * len;
                let hi = grid.x_max() - EDGE_TAPER_OFFSET * len;
                let w = EDGE_TAPER_WIDTH * len;
                if !(lo + 3.0 * w < 0.0 && 0.0 < hi - 3.0 * w) {
                    return Err(Error::InvalidPotential(format!(
                        "step centre x = 0 must lie well inside the grid [{}, {})",
                        grid.x_min(),
                        grid.x_max()
                    )));
                }
                Ok(grid
                    .points()
                    .map(|x| tanh_potential(x, *v0, *width) * smooth_window(x, lo, hi, w))
                    .collect())
            }
            PotentialSpec::Table { values } => {
                if values.len() != grid.n() {
                    return Err(Error::InvalidPotential(format!(
                        "table has {} values but the grid has {} points",
                        values.len(),
                        grid.n()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_examples() {
        let (v0, w) = (3.0, 0.2);
        assert_eq!(tanh_potential(0.0, v0, w), 1.5);
        assert!(tanh_potential(5.0 * w, v0, w) >= 0.9999 * v0);
        assert!(tanh_potential(-5.0 * w, v0, w) <= 1e-4 * v0);
    }

    #[test]
    fn narrow_width_approaches_step() {
        let v0 = 2.0;
        for w in [1e-2, 1e-4, 1e-6] {
            assert!(
                (tanh_potential(0.05, v0, w) - v0).abs()
                    <= v0 * 2.0 * (-2.0 * 0.05 / w).exp() + 1e-15
            );
            assert!(tanh_potential(-0.05, v0, w) <= v0 * 2.0 * (-2.0 * 0.05 / w).exp() + 1e-15);
        }
    }

    #[test]
    fn sampled_step_vanishes_at_the_seam() {
        let grid = Grid1D::new(256, -1.0, 1.0).unwrap();
        let v = PotentialSpec::TanhStep {
            v0: 100.0,
            width: 0.01,
        }
        .sample(&grid)
        .unwrap();
        assert!(v[0].abs() < 1e-3 && v[255].abs() < 1e-2);
        assert!((v[128] - 50.0).abs() < 1e-9);
        assert!((v[160] - 100.0).abs() < 1e-6);
    }

    #[test]
    fn table_length_checked() {
        let grid = Grid1D::new(16, -1.0, 1.0).unwrap();
        let err = PotentialSpec::Table {
            values: vec![0.0; 8],
        }
        .sample(&grid);
        assert!(matches!(err, Err(Error::InvalidPotential(_))));
        let bad = PotentialSpec::TanhStep {
            v0: 1.0,
            width: 0.0,
        };
        assert!(bad.validate().is_err());
    }
}
