//! Fixed-momentum structure of the free Dirac Hamiltonian `h(p) = c alpha_x p + beta m c^2`.
//!
//! Momentum is one-dimensional and points along x. Every formula takes a
//! [`PhysConsts`] so the same code runs in atomic, SI or natural units.

use serde::{Deserialize, Serialize};

use crate::algebra::{alpha, beta, Complex, Mat4, Spinor, I};
use crate::error::{Error, Result};

/// CODATA 2018 fine-structure constant.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
/// Speed of light in atomic units, as used throughout the desk-scale runs.
pub const C_ATOMIC: f64 = 137.035_999;

pub mod codata {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const C: f64 = 299_792_458.0;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    pub const PLANCK: f64 = 6.626_070_15e-34;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitSystem {
    #[serde(rename = "atomic", alias = "au", alias = "AtomicUnits")]
    AtomicUnits,
    #[serde(rename = "si", alias = "SI")]
    SI,
    #[serde(rename = "natural", alias = "Natural")]
    Natural,
}

/// Physical constants in one unit system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysConsts {
    pub system: UnitSystem,
    pub hbar: f64,
    pub c: f64,
    pub m: f64,
    pub e: f64,
    pub eps0: f64,
}

impl PhysConsts {
    /// Hartree atomic units: `hbar = m = e = 4 pi eps0 = 1`.
    pub fn atomic() -> Self {
        PhysConsts {
            system: UnitSystem::AtomicUnits,
            hbar: 1.0,
            c: C_ATOMIC,
            m: 1.0,
            e: 1.0,
            eps0: 1.0 / (4.0 * std::f64::consts::PI),
        }
    }

    pub fn si() -> Self {
        PhysConsts {
            system: UnitSystem::SI,
            hbar: codata::HBAR,
            c: codata::C,
            m: codata::ELECTRON_MASS,
            e: codata::ELEMENTARY_CHARGE,
            eps0: codata::EPSILON_0,
        }
    }

    /// `hbar = c = m = eps0 = 1` with `e^2 = 4 pi alpha`.
    pub fn natural() -> Self {
        PhysConsts {
            system: UnitSystem::Natural,
            hbar: 1.0,
            c: 1.0,
            m: 1.0,
            e: (4.0 * std::f64::consts::PI * FINE_STRUCTURE).sqrt(),
            eps0: 1.0,
        }
    }

    pub fn for_system(system: UnitSystem) -> Self {
        match system {
            UnitSystem::AtomicUnits => Self::atomic(),
            UnitSystem::SI => Self::si(),
            UnitSystem::Natural => Self::natural(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("c", self.c),
            ("m", self.m),
            ("e", self.e),
            ("eps0", self.eps0),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(
                    format!("constants.{name}"),
                    format!("must be finite and positive, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    /// Reduced Compton wavelength `hbar / (m c)`.
    pub fn compton_length(&self) -> f64 {
        self.hbar / (self.m * self.c)
    }

    /// `e^2 / (4 pi eps0 hbar c)` evaluated in this system.
    pub fn fine_structure(&self) -> f64 {
        self.e * self.e / (4.0 * std::f64::consts::PI * self.eps0 * self.hbar * self.c)
    }

    /// Zitterbewegung angular frequency of a particle at rest, `2 m c^2 / hbar`.
    pub fn zb_angular_frequency(&self) -> f64 {
        2.0 * self.rest_energy() / self.hbar
    }
}

/// One-dimensional momentum (along x).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MomentumPoint(pub f64);

impl From<f64> for MomentumPoint {
    fn from(p: f64) -> Self {
        MomentumPoint(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn factor(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            EnergySign::Positive => EnergySign::Negative,
            EnergySign::Negative => EnergySign::Positive,
        }
    }
}

/// Spin label of the rest-frame basis spinors.
///
/// Positive energy: up = (1,0,0,0), down = (0,1,0,0).
/// Negative energy: up = (0,0,1,0), down = (0,0,0,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Sign of the velocity eigenvalue `+c` or `-c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VelocitySign {
    Plus,
    Minus,
}

/// Parameters of the closed-form velocity eigenstates built from two amplitudes `a`, `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityEigenstateSpec {
    pub axis: Axis,
    pub a: Complex,
    pub b: Complex,
    pub sign: VelocitySign,
}

/// `sqrt(m^2 c^4 + p^2 c^2)`.
pub fn energy(p: MomentumPoint, k: &PhysConsts) -> f64 {
    (k.rest_energy()).hypot(p.0 * k.c)
}

/// `p c / sqrt(m^2 c^2 + p^2)`; identical to `c^2 p / E`.
pub fn velocity_from_momentum(p: MomentumPoint, k: &PhysConsts) -> f64 {
    p.0 * k.c / (k.m * k.c).hypot(p.0)
}

/// `h(p) = c p alpha_x + m c^2 beta`.
pub fn free_hamiltonian(p: MomentumPoint, k: &PhysConsts) -> Mat4 {
    alpha(0).scale_re(k.c * p.0) + beta().scale_re(k.rest_energy())
}

/// Energy-sign projector `(E I +/- h(p)) / (2E)`.
pub fn energy_projector(p: MomentumPoint, sign: EnergySign, k: &PhysConsts) -> Mat4 {
    let e = energy(p, k);
    let h = free_hamiltonian(p, k);
    (Mat4::identity().scale_re(e) + h.scale_re(sign.factor())).scale_re(0.5 / e)
}

fn rest_spinor(sign: EnergySign, spin: Spin) -> Spinor {
    let idx = match (sign, spin) {
        (EnergySign::Positive, Spin::Up) => 0,
        (EnergySign::Positive, Spin::Down) => 1,
        (EnergySign::Negative, Spin::Up) => 2,
        (EnergySign::Negative, Spin::Down) => 3,
    };
    Spinor::basis(idx)
}

/// Normalized eigenspinor of `h(p)` with eigenvalue `sign * E_p`.
///
/// Obtained by projecting the matching rest-frame basis spinor; the projection
/// has squared norm `(E + m c^2) / 2E` and never vanishes.
pub fn free_eigenspinor(p: MomentumPoint, sign: EnergySign, spin: Spin, k: &PhysConsts) -> Spinor {
    energy_projector(p, sign, k)
        .apply(&rest_spinor(sign, spin))
        .normalized()
}

/// Closed-form eigenstates of `c alpha_axis` with eigenvalue `+c` or `-c`.
pub fn velocity_eigenstate(spec: &VelocityEigenstateSpec) -> Result<Spinor> {
    let weight = spec.a.norm_sqr() + spec.b.norm_sqr();
    if (weight - 0.5).abs() > 1e-10 {
        return Err(Error::BadNormalization { weight });
    }
    let (a, b) = (spec.a, spec.b);
    let s = match (spec.axis, spec.sign) {
        (Axis::X, VelocitySign::Plus) => [a, b, b, a],
        (Axis::X, VelocitySign::Minus) => [a, b, -b, -a],
        (Axis::Y, VelocitySign::Plus) => [a, b, -I * b, I * a],
        (Axis::Y, VelocitySign::Minus) => [a, b, I * b, -I * a],
        (Axis::Z, VelocitySign::Plus) => [a, b, a, -b],
        (Axis::Z, VelocitySign::Minus) => [a, b, -a, b],
    };
    Ok(Spinor(s))
}

/// Weights `(||L+ psi||^2, ||L- psi||^2)` of a normalized spinor at momentum `p`.
pub fn energy_content(psi: &Spinor, p: MomentumPoint, k: &PhysConsts) -> (f64, f64) {
    let plus = energy_projector(p, EnergySign::Positive, k)
        .apply(psi)
        .norm_sqr();
    let minus = energy_projector(p, EnergySign::Negative, k)
        .apply(psi)
        .norm_sqr();
    (plus, minus)
}

/// `<psi| c alpha_axis |psi>`.
pub fn velocity_expectation(psi: &Spinor, axis: Axis, k: &PhysConsts) -> f64 {
    k.c * psi.expectation(&alpha(axis.index())).re
}

/// `h(p)^{-1} = h(p) / E^2` (since `h^2 = E^2 I`).
fn inverse_hamiltonian(p: MomentumPoint, k: &PhysConsts) -> Result<Mat4> {
    let h = free_hamiltonian(p, k);
    let e = energy(p, k);
    let scale = h.max_abs();
    if !(e.is_finite() && e > 0.0 && scale > 0.0) {
        return Err(Error::SingularH { p: p.0 });
    }
    // det h = E^4; compare in units of the largest entry so SI magnitudes do not trip the guard
    let rel_det = (h.scale_re(1.0 / scale)).determinant().norm();
    if rel_det < 1e-30 {
        return Err(Error::SingularH { p: p.0 });
    }
    Ok(h.scale_re(1.0 / (e * e)))
}

/// `exp(-i h(p) s / hbar) = cos(E s/hbar) I - i sin(E s/hbar) h / E`.
pub fn free_propagator(p: MomentumPoint, s: f64, k: &PhysConsts) -> Mat4 {
    let e = energy(p, k);
    let phase = e * s / k.hbar;
    let h = free_hamiltonian(p, k);
    Mat4::identity().scale_re(phase.cos()) - h.scale(I * (phase.sin() / e))
}

/// `c^2 p h^{-1}`: the operator multiplying `t` in the position operator.
pub fn classical_velocity_operator(p: MomentumPoint, k: &PhysConsts) -> Result<Mat4> {
    Ok(inverse_hamiltonian(p, k)?.scale_re(k.c * k.c * p.0))
}

/// Momentum-space realization of the time-dependent position operator
/// `c^2 h^-1 p t + (i hbar c / 2)(alpha_x - c h^-1 p) h^-1 exp(-2 i h t / hbar)`,
/// with the integration constant set to zero.
pub fn position_operator_t(t: f64, p: MomentumPoint, k: &PhysConsts) -> Result<Mat4> {
    let h_inv = inverse_hamiltonian(p, k)?;
    let classical = h_inv.scale_re(k.c * k.c * p.0 * t);
    let a = alpha(0) - h_inv.scale_re(k.c * p.0);
    let osc = free_propagator(p, 2.0 * t, k);
    let zitter = (a * h_inv * osc).scale(I * (0.5 * k.hbar * k.c));
    Ok(classical + zitter)
}

/// Eigenvalue `hbar^2 c^2 / (4 E^2)` of `x^dagger x` in the rest frame.
pub fn xdagx_eigenvalue(e: f64, k: &PhysConsts) -> f64 {
    let r = k.hbar * k.c / (2.0 * e);
    r * r
}

/// The matrix terms added to `x` by the Foldy-Wouthuysen mean position, restricted
/// to 1D where the spin cross product has no x component:
/// `i hbar c beta alpha_x / 2E - i hbar c beta alpha_x (c p) p / (2 E (E + m c^2) |p|)`.
pub fn fw_correction(p: MomentumPoint, k: &PhysConsts) -> Mat4 {
    let e = energy(p, k);
    let ba = beta() * alpha(0);
    let first = ba.scale(I * (k.hbar * k.c / (2.0 * e)));
    // (c p) p / |p| = c |p|, and the term vanishes at p = 0
    let second = ba.scale(I * (k.hbar * k.c * k.c * p.0.abs() / (2.0 * e * (e + k.rest_energy()))));
    first - second
}

/// Foldy-Wouthuysen position operator at `t` built on top of [`position_operator_t`].
pub fn fw_position_operator(t: f64, p: MomentumPoint, k: &PhysConsts) -> Result<Mat4> {
    Ok(position_operator_t(t, p, k)? + fw_correction(p, k))
}

/// Hermiticity defect of the Foldy-Wouthuysen position operator at `t = 0`.
pub fn fw_position_defect(p: MomentumPoint, k: &PhysConsts) -> Result<f64> {
    Ok(crate::algebra::hermiticity_defect(&fw_position_operator(
        0.0, p, k,
    )?))
}

/// Charge-conjugation map `psi_c = i beta alpha_y psi^*`.
pub fn charge_conjugate(psi: &Spinor) -> Spinor {
    (beta() * alpha(1)).scale(I).apply(&psi.conj())
}

/// A normalized mixture `c_plus u_+(p) + c_minus u_-(p)` whose negative-energy part is
/// the `alpha_x` partner of the positive one: `u_- ~ L_-(p) alpha_x u_+(p)`.
///
/// At `p = 0` the equal mix is the `+c` eigenstate `(1,0,0,1)/sqrt 2` of `c alpha_x`.
pub fn zitter_pair(p: MomentumPoint, k: &PhysConsts) -> (Spinor, Spinor) {
    let u_plus = free_eigenspinor(p, EnergySign::Positive, Spin::Up, k);
    let u_minus = energy_projector(p, EnergySign::Negative, k)
        .apply(&alpha(0).apply(&u_plus))
        .normalized();
    (u_plus, u_minus)
}

#[cfg(test)]
pub(crate) fn real(x: f64) -> Complex {
    Complex::new(x, 0.0)
}
