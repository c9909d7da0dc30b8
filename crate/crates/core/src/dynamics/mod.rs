//! Wavepacket evolution under `H = c alpha_x p + beta m c^2 + V(x)` on a periodic grid.

mod field;
mod grid;
mod oracle;
mod propagator;
mod series;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use field::{
    energy_expectation, energy_sign_fractions, fmt_f64, init_gaussian, mean_position,
    mean_velocity, GaussianPacket, Spectral, SpinorField,
};
pub use grid::Grid1D;
pub use oracle::{dense_evolve_oracle, grid_hamiltonian, MAX_ORACLE_POINTS};
pub use propagator::{split_step, SplitStepPropagator, Workspace};
pub use series::{
    detrended_max_abs, linear_fit, zb_fit, zb_fit_with, ObservableSeries, ZbFit, ZbFitOptions,
};

use crate::error::{Error, Result};
use crate::pairsim::PotentialSpec;
use crate::planewave::PhysConsts;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

/// Largest step that still samples the rest-frame zitterbewegung period 16 times.
pub fn max_resolving_dt(k: &PhysConsts) -> f64 {
    (2.0 * PI * k.hbar / (2.0 * k.rest_energy())) / 16.0
}

impl EvolutionConfig {
    pub fn validate(&self, grid: &Grid1D, k: &PhysConsts) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Resolution {
                bound: format!("dt > 0 (got {})", self.dt),
            });
        }
        if self.n_steps == 0 || self.record_every == 0 {
            return Err(Error::Resolution {
                bound: "n_steps >= 1 and record_every >= 1".into(),
            });
        }
        let dt_max = max_resolving_dt(k);
        if self.dt > dt_max {
            return Err(Error::Resolution {
                bound: format!(
                    "dt <= (2 pi hbar / 2mc^2) / 16 = {dt_max:e} (got {:e})",
                    self.dt
                ),
            });
        }
        let cutoff = grid.momentum_cutoff(k);
        if cutoff <= 8.0 * k.m * k.c {
            return Err(Error::Resolution {
                bound: format!(
                    "momentum cutoff pi hbar / dx = {cutoff:.6e} must exceed 8 m c = {:.6e}",
                    8.0 * k.m * k.c
                ),
            });
        }
        self.potential.validate()
    }
}

/// Observables sampled during [`evolve_recording`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvolutionRecord {
    pub position: ObservableSeries,
    pub velocity: ObservableSeries,
    pub norm: ObservableSeries,
    pub f_plus: ObservableSeries,
}

/// Evolves `field` in place, sampling observables at `t0` and every `record_every` steps.
pub fn evolve_recording(
    field: &mut SpinorField,
    cfg: &EvolutionConfig,
    k: &PhysConsts,
) -> Result<EvolutionRecord> {
    cfg.validate(&field.grid, k)?;
    let prop = SplitStepPropagator::new(field.grid, cfg.dt, &cfg.potential, k)?;
    let mut ws = prop.workspace();
    let mut rec = EvolutionRecord {
        position: ObservableSeries::new("mean_position"),
        velocity: ObservableSeries::new("mean_velocity"),
        norm: ObservableSeries::new("norm"),
        f_plus: ObservableSeries::new("f_plus"),
    };
    let t0 = field.time;
    let sample = |field: &SpinorField, rec: &mut EvolutionRecord, step: usize| -> Result<()> {
        let t = t0 + step as f64 * cfg.dt;
        rec.position.push(t, mean_position(field))?;
        rec.velocity.push(t, mean_velocity(field, k))?;
        rec.norm.push(t, field.norm_sqr())?;
        rec.f_plus.push(t, energy_sign_fractions(field, k).0)?;
        Ok(())
    };
    sample(field, &mut rec, 0)?;
    let mut done = 0;
    while done < cfg.n_steps {
        let chunk = cfg.record_every.min(cfg.n_steps - done);
        prop.evolve(field, chunk, &mut ws);
        done += chunk;
        sample(field, &mut rec, done)?;
    }
    field.time = t0 + cfg.n_steps as f64 * cfg.dt;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_violated_bound() {
        let k = PhysConsts::atomic();
        let grid = Grid1D::centered(1024, 2.0).unwrap();
        let cfg = EvolutionConfig {
            dt: 1e-4,
            n_steps: 10,
            potential: PotentialSpec::Zero,
            record_every: 1,
        };
        let err = cfg.validate(&grid, &k).unwrap_err().to_string();
        assert!(err.contains("dt <="), "{err}");

        let coarse = Grid1D::centered(1024, 8.0).unwrap();
        let cfg = EvolutionConfig { dt: 1e-5, ..cfg };
        let err = cfg.validate(&coarse, &k).unwrap_err().to_string();
        assert!(err.contains("momentum cutoff"), "{err}");
        assert!(cfg.validate(&grid, &k).is_ok());
    }
}
