use super::field::{Spectral, SpinorField};
use super::Grid1D;
use crate::algebra::{Complex, Mat4, Spinor};
use crate::error::Result;
use crate::pairsim::PotentialSpec;
use crate::planewave::{free_propagator, MomentumPoint, PhysConsts};

/// Strang-split propagator for `H = c alpha_x p + beta m c^2 + V(x)` on a periodic grid.
///
/// The kinetic factor is the exact per-mode exponential
/// `cos(E dt/hbar) I - i sin(E dt/hbar) h(p)/E`, so for `V = 0` a step is exact
/// up to FFT roundoff. Built once and shared read-only between evolutions.
#[derive(Clone, Debug)]
pub struct SplitStepPropagator {
    grid: Grid1D,
    dt: f64,
    spectral: Spectral,
    /// Kinetic propagator per FFT bin, with the inverse-FFT `1/n` folded in.
    kinetic: Vec<Mat4>,
    half_phase: Option<Vec<Complex>>,
    full_phase: Option<Vec<Complex>>,
}

/// Reusable buffers for one evolving field.
pub struct Workspace {
    scratch: Vec<Complex>,
}

impl SplitStepPropagator {
    pub fn new(grid: Grid1D, dt: f64, potential: &PotentialSpec, k: &PhysConsts) -> Result<Self> {
        let values = potential.sample(&grid)?;
        Ok(Self::from_samples(grid, dt, &values, k))
    }

    /// Propagator for an already sampled potential (one value per grid point).
    pub fn from_samples(grid: Grid1D, dt: f64, potential: &[f64], k: &PhysConsts) -> Self {
        assert_eq!(potential.len(), grid.n());
        let scale = 1.0 / grid.n() as f64;
        let kinetic = (0..grid.n())
            .map(|m| free_propagator(MomentumPoint(grid.momentum(m, k)), dt, k).scale_re(scale))
            .collect();
        let has_potential = potential.iter().any(|&v| v != 0.0);
        let phases = |frac: f64| -> Vec<Complex> {
            potential
                .iter()
                .map(|v| Complex::from_polar(1.0, -v * frac * dt / k.hbar))
                .collect()
        };
        SplitStepPropagator {
            grid,
            dt,
            spectral: Spectral::new(grid.n()),
            kinetic,
            half_phase: has_potential.then(|| phases(0.5)),
            full_phase: has_potential.then(|| phases(1.0)),
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            scratch: self.spectral.scratch(),
        }
    }

    fn apply_phase(field: &mut SpinorField, phase: &[Complex]) {
        for c in field.comps.iter_mut() {
            for (z, p) in c.iter_mut().zip(phase) {
                *z *= p;
            }
        }
    }

    fn apply_kinetic(&self, field: &mut SpinorField, ws: &mut Workspace) {
        for c in field.comps.iter_mut() {
            self.spectral.forward(c, &mut ws.scratch);
        }
        let [c0, c1, c2, c3] = &mut field.comps;
        for (m, u) in self.kinetic.iter().enumerate() {
            let s = u.apply(&Spinor([c0[m], c1[m], c2[m], c3[m]]));
            c0[m] = s.0[0];
            c1[m] = s.0[1];
            c2[m] = s.0[2];
            c3[m] = s.0[3];
        }
        for c in field.comps.iter_mut() {
            self.spectral.inverse_unscaled(c, &mut ws.scratch);
        }
    }

    /// One step: half potential, kinetic, half potential.
    pub fn step(&self, field: &mut SpinorField, ws: &mut Workspace) {
        self.evolve(field, 1, ws);
    }

    /// `n_steps` Strang steps with adjacent potential half-steps fused.
    pub fn evolve(&self, field: &mut SpinorField, n_steps: usize, ws: &mut Workspace) {
        debug_assert_eq!(field.grid, self.grid);
        if n_steps == 0 {
            return;
        }
        if let Some(half) = &self.half_phase {
            Self::apply_phase(field, half);
        }
        for i in 0..n_steps {
            self.apply_kinetic(field, ws);
            match (&self.half_phase, &self.full_phase) {
                (Some(half), _) if i + 1 == n_steps => Self::apply_phase(field, half),
                (_, Some(full)) => Self::apply_phase(field, full),
                _ => {}
            }
        }
        field.time += n_steps as f64 * self.dt;
    }
}

/// Single Strang step of `field` under `potential`.
pub fn split_step(
    field: &SpinorField,
    dt: f64,
    potential: &PotentialSpec,
    k: &PhysConsts,
) -> Result<SpinorField> {
    let prop = SplitStepPropagator::new(field.grid, dt, potential, k)?;
    let mut out = field.clone();
    let mut ws = prop.workspace();
    prop.step(&mut out, &mut ws);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{init_gaussian, GaussianPacket};
    use crate::planewave::{energy, free_eigenspinor, EnergySign, Spin};

    #[test]
    fn plane_wave_picks_up_energy_phase() {
        let k = PhysConsts::atomic();
        let grid = Grid1D::centered(64, 2.0).unwrap();
        let m = 3;
        let p = grid.momentum(m, &k);
        let u = free_eigenspinor(MomentumPoint(p), EnergySign::Positive, Spin::Up, &k);
        let field =
            SpinorField::from_fn(grid, |x| u.scale(Complex::new(0.0, p * x / k.hbar).exp()));
        let dt = 1e-5;
        let out = split_step(&field, dt, &PotentialSpec::Zero, &k).unwrap();
        let phase = Complex::from_polar(1.0, -energy(MomentumPoint(p), &k) * dt / k.hbar);
        for j in 0..grid.n() {
            let want = field.spinor(j).scale(phase);
            assert!(out.spinor(j).max_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn constant_potential_is_a_global_phase() {
        let k = PhysConsts::atomic();
        let grid = Grid1D::centered(128, 2.0).unwrap();
        let packet = GaussianPacket {
            x0: 0.0,
            p0: 5.0,
            sigma_x: 0.1,
            c_plus: Complex::new(0.8, 0.0),
            c_minus: Complex::new(0.6, 0.0),
        };
        let field = init_gaussian(grid, &packet, &k).unwrap();
        let free = split_step(&field, 2e-5, &PotentialSpec::Zero, &k).unwrap();
        let shifted = split_step(
            &field,
            2e-5,
            &PotentialSpec::Table {
                values: vec![1234.5; grid.n()],
            },
            &k,
        )
        .unwrap();
        for (a, b) in free.density().iter().zip(shifted.density()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn fused_steps_match_single_steps() {
        let k = PhysConsts::atomic();
        let grid = Grid1D::centered(128, 2.0).unwrap();
        let packet = GaussianPacket {
            x0: -0.2,
            p0: 30.0,
            sigma_x: 0.12,
            c_plus: Complex::new(1.0, 0.0),
            c_minus: Complex::new(0.0, 0.0),
        };
        let field = init_gaussian(grid, &packet, &k).unwrap();
        let pot = PotentialSpec::TanhStep {
            v0: 5000.0,
            width: 0.05,
        };
        let prop = SplitStepPropagator::new(grid, 1e-5, &pot, &k).unwrap();
        let mut ws = prop.workspace();
        let mut fused = field.clone();
        prop.evolve(&mut fused, 10, &mut ws);
        let mut single = field.clone();
        for _ in 0..10 {
            prop.step(&mut single, &mut ws);
        }
        assert!(fused.max_diff(&single) < 1e-12);
        assert!((fused.time - 1e-4).abs() < 1e-18);
    }
}
