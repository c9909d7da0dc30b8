//! Mode-sum densities of the electron-positron pair created by a suddenly
//! switched-on potential.
//!
//! Every free plane-wave mode of the grid is evolved independently with the
//! split-step propagator. Electrons come from negative-energy modes that
//! acquire positive-energy components:
//! `rho_e(x) = sum_n |(L+ U(t) w_n)(x)|^2`. Positrons come from positive-energy
//! modes that acquire negative-energy components, mapped through charge
//! conjugation (which preserves the pointwise norm).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::PotentialSpec;
use crate::algebra::{Complex, Mat4, Spinor};
use crate::dynamics::{Grid1D, Spectral, SpinorField, SplitStepPropagator};
use crate::error::{Error, Result};
use crate::par::{map_ordered, sum_vectors, CompensatedSum, Execution};
use crate::planewave::{
    charge_conjugate, energy_projector, free_eigenspinor, EnergySign, MomentumPoint, PhysConsts,
    Spin,
};

/// Largest grid for which the joint `rho(x, y)` is assembled.
pub const MAX_JOINT_POINTS: usize = 256;
/// Modes evolved per parallel task.
const MODES_PER_TASK: usize = 16;

/// Electron and positron position densities at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDensities {
    pub grid: Grid1D,
    pub rho_e: Vec<f64>,
    pub rho_p: Vec<f64>,
    pub time: f64,
    pub joint: Option<JointDensity>,
}

impl PairDensities {
    pub fn electron_number(&self) -> f64 {
        integrate(&self.rho_e, self.grid.dx())
    }

    pub fn positron_number(&self) -> f64 {
        integrate(&self.rho_p, self.grid.dx())
    }

    /// Writes `x,rho_e,rho_p` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::dynamics::fmt_f64;
        writeln!(w, "x,rho_e,rho_p")?;
        for (j, x) in self.grid.points().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(x),
                fmt_f64(self.rho_e[j]),
                fmt_f64(self.rho_p[j])
            )?;
        }
        Ok(())
    }
}

fn integrate(values: &[f64], dx: f64) -> f64 {
    let mut s = CompensatedSum::default();
    values.iter().for_each(|&v| s.add(v));
    s.value() * dx
}

/// Joint electron (row, `x`) / positron (column, `y`) density, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDensity {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub values: Vec<f64>,
}

impl JointDensity {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ny + iy]
    }

    /// `int dy rho(x, y)`.
    pub fn electron_marginal(&self) -> Vec<f64> {
        self.values
            .chunks(self.ny)
            .map(|row| row.iter().sum::<f64>() * self.dy)
            .collect()
    }

    /// Dense matrix file: a header line `nx ny dx dy`, then one row per line.
    pub fn write_matrix<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::dynamics::fmt_f64;
        writeln!(
            w,
            "{} {} {} {}",
            self.nx,
            self.ny,
            fmt_f64(self.dx),
            fmt_f64(self.dy)
        )?;
        for row in self.values.chunks(self.ny) {
            let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Settings of a mode-sum run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSumConfig {
    pub grid: Grid1D,
    pub potential: PotentialSpec,
    /// Number of momentum bins (lowest `|p|` first), each with two spins. Defaults to all.
    #[serde(default)]
    pub n_modes: Option<usize>,
    /// Upper bound on the split-step size; intervals are subdivided evenly.
    pub dt_max: f64,
    #[serde(default)]
    pub joint: bool,
    #[serde(default)]
    pub execution: Execution,
}

impl ModeSumConfig {
    /// Desk-scale defaults: 512 points on a box of 2 a.u. centred on the step.
    pub fn desk(potential: PotentialSpec) -> Self {
        ModeSumConfig {
            grid: Grid1D::centered(512, 2.0).expect("valid default grid"),
            potential,
            n_modes: None,
            dt_max: 2e-6,
            joint: false,
            execution: Execution::Parallel,
        }
    }

    fn selected_bins(&self, k: &PhysConsts) -> Result<Vec<usize>> {
        let n = self.grid.n();
        let requested = self.n_modes.unwrap_or(n);
        if requested > n {
            return Err(Error::TooManyModes {
                requested,
                available: n,
            });
        }
        let mut bins: Vec<usize> = (0..n).collect();
        bins.sort_by(|&a, &b| {
            self.grid
                .momentum(a, k)
                .abs()
                .total_cmp(&self.grid.momentum(b, k).abs())
                .then(a.cmp(&b))
        });
        bins.truncate(requested);
        Ok(bins)
    }
}

#[derive(Clone, Copy, Debug)]
struct Mode {
    bin: usize,
    spin: Spin,
    /// Energy sign of the initial free mode.
    sign: EnergySign,
}

/// Evolution plan shared by all modes: one propagator per distinct step size.
struct Plan {
    grid: Grid1D,
    /// (number of steps, propagator key) for each interval ending at a sample time.
    intervals: Vec<(usize, u64)>,
    props: BTreeMap<u64, SplitStepPropagator>,
    spectral: Spectral,
    /// Per bin projectors with the inverse-FFT `1/n` folded in.
    to_positive: Vec<Mat4>,
    to_negative: Vec<Mat4>,
}

impl Plan {
    fn new(cfg: &ModeSumConfig, values: &[f64], times: &[f64], k: &PhysConsts) -> Result<Self> {
        if !(cfg.dt_max.is_finite() && cfg.dt_max > 0.0) {
            return Err(Error::config("pairsim.dt_max", "must be positive"));
        }
        let mut prev = 0.0;
        let mut intervals = Vec::with_capacity(times.len());
        let mut props = BTreeMap::new();
        for &t in times {
            if !(t.is_finite() && t >= prev) {
                return Err(Error::config(
                    "pairsim.times",
                    "times must be finite, non-negative and sorted",
                ));
            }
            let span = t - prev;
            if span == 0.0 {
                intervals.push((0, 0));
            } else {
                let steps = (span / cfg.dt_max).ceil().max(1.0) as usize;
                let dt = span / steps as f64;
                let key = dt.to_bits();
                props
                    .entry(key)
                    .or_insert_with(|| SplitStepPropagator::from_samples(cfg.grid, dt, values, k));
                intervals.push((steps, key));
            }
            prev = t;
        }
        let scale = 1.0 / cfg.grid.n() as f64;
        let projectors = |sign| -> Vec<Mat4> {
            (0..cfg.grid.n())
                .map(|m| {
                    energy_projector(MomentumPoint(cfg.grid.momentum(m, k)), sign, k)
                        .scale_re(scale)
                })
                .collect()
        };
        Ok(Plan {
            grid: cfg.grid,
            intervals,
            props,
            spectral: Spectral::new(cfg.grid.n()),
            to_positive: projectors(EnergySign::Positive),
            to_negative: projectors(EnergySign::Negative),
        })
    }

    fn initial_field(&self, mode: &Mode, k: &PhysConsts) -> SpinorField {
        let grid = self.grid;
        let u = free_eigenspinor(
            MomentumPoint(grid.momentum(mode.bin, k)),
            mode.sign,
            mode.spin,
            k,
        );
        let mut field = SpinorField::zeros(grid);
        let amp = grid.n() as f64 / grid.length().sqrt();
        let mut scratch = self.spectral.scratch();
        for (a, c) in field.comps.iter_mut().enumerate() {
            c[mode.bin] = u.0[a] * amp;
            self.spectral.inverse(c, &mut scratch);
        }
        field
    }

    /// Position-space components of the `target`-energy part of `field`.
    fn project(&self, field: &SpinorField, target: EnergySign) -> [Vec<Complex>; 4] {
        let mut scratch = self.spectral.scratch();
        let mut mom = field.to_momentum(&self.spectral);
        let projectors = match target {
            EnergySign::Positive => &self.to_positive,
            EnergySign::Negative => &self.to_negative,
        };
        for (m, proj) in projectors.iter().enumerate() {
            let s = proj.apply(&Spinor(std::array::from_fn(|a| mom[a][m])));
            for a in 0..4 {
                mom[a][m] = s.0[a];
            }
        }
        for c in mom.iter_mut() {
            self.spectral.inverse_unscaled(c, &mut scratch);
        }
        mom
    }

    /// Evolves one mode, visiting the field at each sample time.
    fn evolve_mode(&self, mode: &Mode, k: &PhysConsts, mut visit: impl FnMut(usize, &SpinorField)) {
        let mut field = self.initial_field(mode, k);
        let mut ws = None;
        for (i, &(steps, key)) in self.intervals.iter().enumerate() {
            if steps > 0 {
                let prop = &self.props[&key];
                let ws = ws.get_or_insert_with(|| prop.workspace());
                prop.evolve(&mut field, steps, ws);
            }
            visit(i, &field);
        }
    }
}

fn accumulate(acc: &mut [CompensatedSum], part: &[Vec<Complex>; 4]) {
    for (j, a) in acc.iter_mut().enumerate() {
        a.add(part.iter().map(|c| c[j].norm_sqr()).sum());
    }
}

fn mode_densities(
    plan: &Plan,
    modes: &[Mode],
    n_times: usize,
    k: &PhysConsts,
    exec: Execution,
) -> Vec<Vec<f64>> {
    let n = plan.grid.n();
    let tasks: Vec<&[Mode]> = modes.chunks(MODES_PER_TASK).collect();
    let partials: Vec<Vec<Vec<f64>>> = map_ordered(exec, &tasks, |chunk| {
        let mut acc = vec![vec![CompensatedSum::default(); n]; n_times];
        for mode in chunk.iter() {
            let target = mode.sign.flip();
            plan.evolve_mode(mode, k, |i, field| {
                accumulate(&mut acc[i], &plan.project(field, target))
            });
        }
        acc.into_iter()
            .map(|a| a.iter().map(CompensatedSum::value).collect())
            .collect()
    });
    (0..n_times)
        .map(|i| sum_vectors(n, partials.iter().map(|p| p[i].as_slice())))
        .collect()
}

type Components = [Vec<Complex>; 4];

fn joint_density(plan: &Plan, modes: &[Mode], k: &PhysConsts, exec: Execution) -> JointDensity {
    let n = plan.grid.n();
    let last = plan.intervals.len() - 1;
    // per negative-energy mode: electron part A_n(x) and conjugated positron part B_n(y)
    let parts: Vec<(Components, Components)> = map_ordered(exec, modes, |mode| {
        let mut out = None;
        plan.evolve_mode(mode, k, |i, field| {
            if i == last {
                out = Some(field.clone());
            }
        });
        let field = out.expect("final sample visited");
        let electron = plan.project(&field, EnergySign::Positive);
        let negative = plan.project(&field, EnergySign::Negative);
        let mut positron: [Vec<Complex>; 4] =
            std::array::from_fn(|_| vec![Complex::new(0.0, 0.0); n]);
        for j in 0..n {
            let s = charge_conjugate(&Spinor(std::array::from_fn(|a| negative[a][j])));
            for a in 0..4 {
                positron[a][j] = s.0[a];
            }
        }
        (electron, positron)
    });
    let n_modes = parts.len();
    let a_mats: Vec<DMatrix<Complex>> = (0..4)
        .map(|a| DMatrix::from_fn(n, n_modes, |x, m| parts[m].0[a][x]))
        .collect();
    let b_mats: Vec<DMatrix<Complex>> = (0..4)
        .map(|b| DMatrix::from_fn(n_modes, n, |m, y| parts[m].1[b][y]))
        .collect();
    let mut values = vec![0.0; n * n];
    for a in &a_mats {
        for b in &b_mats {
            let phi = a * b;
            for x in 0..n {
                for y in 0..n {
                    values[x * n + y] += phi[(x, y)].norm_sqr();
                }
            }
        }
    }
    JointDensity {
        nx: n,
        ny: n,
        dx: plan.grid.dx(),
        dy: plan.grid.dx(),
        values,
    }
}

/// Densities at each of the sorted `times` from a single pass over the modes.
pub fn pair_mode_sum_series(
    cfg: &ModeSumConfig,
    times: &[f64],
    k: &PhysConsts,
) -> Result<Vec<PairDensities>> {
    if times.is_empty() {
        return Ok(Vec::new());
    }
    if cfg.joint && cfg.grid.n() > MAX_JOINT_POINTS {
        return Err(Error::JointTooLarge { n: cfg.grid.n() });
    }
    let bins = cfg.selected_bins(k)?;
    let values = cfg.potential.sample(&cfg.grid)?;
    let plan = Plan::new(cfg, &values, times, k)?;

    let modes_of = |sign| -> Vec<Mode> {
        bins.iter()
            .flat_map(|&bin| [Spin::Up, Spin::Down].map(|spin| Mode { bin, spin, sign }))
            .collect()
    };
    let negative = modes_of(EnergySign::Negative);
    let positive = modes_of(EnergySign::Positive);

    let rho_e = mode_densities(&plan, &negative, times.len(), k, cfg.execution);
    let rho_p = mode_densities(&plan, &positive, times.len(), k, cfg.execution);
    let joint = cfg
        .joint
        .then(|| joint_density(&plan, &negative, k, cfg.execution));

    let last = times.len() - 1;
    Ok(rho_e
        .into_iter()
        .zip(rho_p)
        .zip(times)
        .enumerate()
        .map(|(i, ((rho_e, rho_p), &time))| PairDensities {
            grid: cfg.grid,
            rho_e,
            rho_p,
            time,
            joint: if i == last { joint.clone() } else { None },
        })
        .collect())
}

/// Densities at a single time `t` using every momentum bin up to `n_modes`.
pub fn pair_mode_sum(
    grid: Grid1D,
    potential: &PotentialSpec,
    t: f64,
    k: &PhysConsts,
    n_modes: usize,
) -> Result<PairDensities> {
    let cfg = ModeSumConfig {
        grid,
        potential: potential.clone(),
        n_modes: Some(n_modes),
        ..ModeSumConfig::desk(potential.clone())
    };
    let mut out = pair_mode_sum_series(&cfg, &[t], k)?;
    Ok(out.pop().expect("one sample"))
}
