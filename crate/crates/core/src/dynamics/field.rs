use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use super::Grid1D;
use crate::algebra::{alpha, Complex, Mat4, Spinor, ZERO};
use crate::error::{Error, Result};
use crate::planewave::{
    energy_projector, free_hamiltonian, zitter_pair, EnergySign, MomentumPoint, PhysConsts,
};

/// Forward/inverse FFT plans for one grid size.
#[derive(Clone)]
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        let len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        vec![ZERO; len]
    }

    /// Unnormalized forward transform `sum_j psi_j exp(-2 pi i j m / n)`.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(data, scratch);
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(data, scratch);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    /// Inverse transform without the `1/n` factor.
    pub fn inverse_unscaled(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(data, scratch);
    }
}

/// Four-component spinor field on a periodic grid, stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    pub grid: Grid1D,
    pub comps: [Vec<Complex>; 4],
    pub time: f64,
}

impl SpinorField {
    pub fn zeros(grid: Grid1D) -> Self {
        let n = grid.n();
        SpinorField {
            grid,
            comps: std::array::from_fn(|_| vec![ZERO; n]),
            time: 0.0,
        }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Spinor) -> Self {
        let mut field = Self::zeros(grid);
        for (j, x) in grid.points().enumerate() {
            field.set_spinor(j, &f(x));
        }
        field
    }

    pub fn spinor(&self, j: usize) -> Spinor {
        Spinor(std::array::from_fn(|a| self.comps[a][j]))
    }

    pub fn set_spinor(&mut self, j: usize, s: &Spinor) {
        for a in 0..4 {
            self.comps[a][j] = s.0[a];
        }
    }

    /// `psi^dagger psi` at each grid point.
    pub fn density(&self) -> Vec<f64> {
        (0..self.grid.n())
            .map(|j| self.comps.iter().map(|c| c[j].norm_sqr()).sum())
            .collect()
    }

    /// `sum psi^dagger psi dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.grid.dx()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let s = 1.0 / n;
            self.comps.iter_mut().flatten().for_each(|z| *z *= s);
        }
    }

    /// Largest pointwise spinor-component difference.
    pub fn max_diff(&self, other: &SpinorField) -> f64 {
        self.comps
            .iter()
            .zip(other.comps.iter())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Momentum-space amplitudes (unnormalized FFT of each component).
    pub fn to_momentum(&self, spectral: &Spectral) -> [Vec<Complex>; 4] {
        let mut out = self.comps.clone();
        let mut scratch = spectral.scratch();
        for c in out.iter_mut() {
            spectral.forward(c, &mut scratch);
        }
        out
    }

    /// Writes the snapshot CSV: `x, re1..re4, im1..im4, density`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re1,re2,re3,re4,im1,im2,im3,im4,density")?;
        let density = self.density();
        for j in 0..self.grid.n() {
            write!(w, "{}", fmt_f64(self.grid.x(j)))?;
            for a in 0..4 {
                write!(w, ",{}", fmt_f64(self.comps[a][j].re))?;
            }
            for a in 0..4 {
                write!(w, ",{}", fmt_f64(self.comps[a][j].im))?;
            }
            writeln!(w, ",{}", fmt_f64(density[j]))?;
        }
        Ok(())
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parameters of a Gaussian wavepacket with a chosen energy-sign mixture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub x0: f64,
    pub p0: f64,
    pub sigma_x: f64,
    pub c_plus: Complex,
    pub c_minus: Complex,
}

/// Gaussian envelope `exp(-(x-x0)^2 / 4 sigma^2 + i p0 x / hbar)` whose momentum
/// components are each set to `c_plus u_+(p) + c_minus u_-(p)`.
///
/// `u_-(p)` is the `alpha_x` partner of `u_+(p)` (see [`zitter_pair`]), so the
/// equal mix at rest is a `+c` velocity eigenstate.
pub fn init_gaussian(grid: Grid1D, packet: &GaussianPacket, k: &PhysConsts) -> Result<SpinorField> {
    let weight = packet.c_plus.norm_sqr() + packet.c_minus.norm_sqr();
    if (weight - 1.0).abs() > 1e-10 {
        return Err(Error::BadMix { weight });
    }
    let min = 4.0 * grid.dx();
    if !(packet.sigma_x >= min) {
        return Err(Error::GridTooCoarse {
            sigma: packet.sigma_x,
            min,
        });
    }
    let (lo, hi) = (
        packet.x0 - 5.0 * packet.sigma_x,
        packet.x0 + 5.0 * packet.sigma_x,
    );
    if lo < grid.x_min() || hi > grid.x_max() {
        return Err(Error::PacketOutsideGrid { lo, hi });
    }

    let spectral = Spectral::new(grid.n());
    let mut scratch = spectral.scratch();
    let mut envelope: Vec<Complex> = grid
        .points()
        .map(|x| {
            let d = x - packet.x0;
            Complex::new(
                -d * d / (4.0 * packet.sigma_x * packet.sigma_x),
                packet.p0 * x / k.hbar,
            )
            .exp()
        })
        .collect();
    spectral.forward(&mut envelope, &mut scratch);

    let mut field = SpinorField::zeros(grid);
    for (m, g) in envelope.iter().enumerate() {
        let p = MomentumPoint(grid.momentum(m, k));
        let (up, um) = zitter_pair(p, k);
        let s = (up.scale(packet.c_plus) + um.scale(packet.c_minus)).scale(*g);
        field.set_spinor(m, &s);
    }
    for c in field.comps.iter_mut() {
        spectral.inverse(c, &mut scratch);
    }
    field.normalize();
    Ok(field)
}

/// `<x> = sum x psi^dagger psi dx / ||psi||^2`.
pub fn mean_position(field: &SpinorField) -> f64 {
    let density = field.density();
    let total: f64 = density.iter().sum();
    field
        .grid
        .points()
        .zip(density.iter())
        .map(|(x, d)| x * d)
        .sum::<f64>()
        / total
}

/// `<c alpha_x>`, which equals `d<x>/dt` for the Dirac Hamiltonian.
pub fn mean_velocity(field: &SpinorField, k: &PhysConsts) -> f64 {
    let ax = alpha(0);
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..field.grid.n() {
        let s = field.spinor(j);
        num += s.expectation(&ax).re;
        den += s.norm_sqr();
    }
    k.c * num / den
}

fn projected_weight(field: &SpinorField, projectors: &[Mat4], spectral: &Spectral) -> (f64, f64) {
    let mom = field.to_momentum(spectral);
    let mut plus = 0.0;
    let mut total = 0.0;
    for (m, proj) in projectors.iter().enumerate() {
        let s = Spinor(std::array::from_fn(|a| mom[a][m]));
        plus += proj.apply(&s).norm_sqr();
        total += s.norm_sqr();
    }
    (plus, total)
}

/// Fractions of positive and negative free energy, mode by mode in momentum space.
pub fn energy_sign_fractions(field: &SpinorField, k: &PhysConsts) -> (f64, f64) {
    let grid = field.grid;
    let spectral = Spectral::new(grid.n());
    let projectors: Vec<Mat4> = (0..grid.n())
        .map(|m| energy_projector(MomentumPoint(grid.momentum(m, k)), EnergySign::Positive, k))
        .collect();
    let (plus, total) = projected_weight(field, &projectors, &spectral);
    let f_plus = plus / total;
    (f_plus, 1.0 - f_plus)
}

/// `<h(p)> + <V>` for a field normalized to one.
pub fn energy_expectation(field: &SpinorField, potential: &[f64], k: &PhysConsts) -> f64 {
    let grid = field.grid;
    let spectral = Spectral::new(grid.n());
    let mom = field.to_momentum(&spectral);
    let mut kinetic = 0.0;
    let mut total = 0.0;
    for m in 0..grid.n() {
        let s = Spinor(std::array::from_fn(|a| mom[a][m]));
        let h = free_hamiltonian(MomentumPoint(grid.momentum(m, k)), k);
        kinetic += s.expectation(&h).re;
        total += s.norm_sqr();
    }
    let density = field.density();
    let v: f64 = density
        .iter()
        .zip(potential)
        .map(|(d, v)| d * v)
        .sum::<f64>();
    kinetic / total + v / density.iter().sum::<f64>()
}
