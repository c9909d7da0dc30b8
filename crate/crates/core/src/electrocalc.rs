//! Closed-form self-interaction estimates and atomic-unit conversions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planewave::{codata, PhysConsts, UnitSystem};

pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;
pub const ATOMIC_VELOCITY_M_PER_S: f64 = 2.187_691_263_64e6;
pub const HARTREE_EV: f64 = 27.211_386_245_988;
pub const HARTREE_J: f64 = 4.359_744_722_207_1e-18;
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.950_00;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyUnit {
    Hartree,
    #[serde(rename = "eV")]
    EV,
    Joule,
}

impl EnergyUnit {
    /// Size of one unit in joules.
    pub fn joules(self) -> f64 {
        match self {
            EnergyUnit::Hartree => HARTREE_J,
            EnergyUnit::EV => codata::ELEMENTARY_CHARGE,
            EnergyUnit::Joule => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: f64,
    pub unit: EnergyUnit,
    pub formula_id: String,
}

impl EnergyResult {
    /// Energy expressed in the natural unit of `k`'s system. Natural-unit
    /// energies (multiples of `m c^2`) are reported in eV.
    fn in_system(value: f64, k: &PhysConsts, formula_id: &str) -> Self {
        let (value, unit) = match k.system {
            UnitSystem::AtomicUnits => (value, EnergyUnit::Hartree),
            UnitSystem::SI => (value, EnergyUnit::Joule),
            UnitSystem::Natural => (
                value / k.rest_energy() * ELECTRON_REST_ENERGY_EV,
                EnergyUnit::EV,
            ),
        };
        EnergyResult {
            value,
            unit,
            formula_id: formula_id.to_string(),
        }
    }

    pub fn to_unit(&self, unit: EnergyUnit) -> EnergyResult {
        EnergyResult {
            value: self.value * self.unit.joules() / unit.joules(),
            unit,
            formula_id: self.formula_id.clone(),
        }
    }
}

/// Self-potential of the electron at its own zitterbewegung orbit, `-m c e / (4 pi eps0 hbar)`.
pub fn self_potential(k: &PhysConsts) -> f64 {
    -k.m * k.c * k.e / (4.0 * PI * k.eps0 * k.hbar)
}

/// `alpha m c^2`, the energy added by the self-potential.
pub fn zb_self_energy(k: &PhysConsts) -> EnergyResult {
    EnergyResult::in_system(k.fine_structure() * k.rest_energy(), k, "zb_self_energy")
}

/// `m (1 + alpha)`.
pub fn electromagnetic_mass(k: &PhysConsts) -> f64 {
    k.m * (1.0 + k.fine_structure())
}

/// Field energy outside a uniformly charged shell, `e^2 / (8 pi eps0 R)`.
pub fn shell_model_energy(radius: f64, k: &PhysConsts) -> Result<EnergyResult> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::NonPositiveRadius(radius));
    }
    let v = k.e * k.e / (8.0 * PI * k.eps0 * radius);
    Ok(EnergyResult::in_system(v, k, "shell_model_energy"))
}

/// Darwin-term estimate for a hydrogen-like s state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DarwinShift {
    /// With the `hbar^2 / (6 m^2 c^2)` prefactor.
    pub shift: EnergyResult,
    /// Same estimate with the usual `hbar^2 / (8 m^2 c^2)` prefactor.
    pub conventional: EnergyResult,
}

/// `(hbar^2 / 6 m^2 c^2) (Z e^2 / eps0) |psi_n00(0)|^2` with `|psi(0)|^2 = Z^3 / (pi n^3 a0^3)`.
pub fn darwin_shift_s_state(z: u32, n: u32, l: u32, k: &PhysConsts) -> Result<DarwinShift> {
    if l != 0 {
        return Err(Error::NotSState { l });
    }
    if z == 0 || n == 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "Z = {z} and n = {n} must be positive"
        )));
    }
    let (zf, nf) = (z as f64, n as f64);
    if zf * k.fine_structure() >= 1.0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "Z alpha = {} must be below 1",
            zf * k.fine_structure()
        )));
    }
    let a0 = 4.0 * PI * k.eps0 * k.hbar * k.hbar / (k.m * k.e * k.e);
    let density = zf.powi(3) / (PI * nf.powi(3) * a0.powi(3));
    let laplacian = zf * k.e * k.e / k.eps0 * density;
    let mc = k.m * k.c;
    let base = k.hbar * k.hbar / (mc * mc) * laplacian;
    Ok(DarwinShift {
        shift: EnergyResult::in_system(base / 6.0, k, "darwin_shift_1_6"),
        conventional: EnergyResult::in_system(base / 8.0, k, "darwin_shift_1_8"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Length,
    Time,
    Velocity,
    Energy,
}

impl Dimension {
    /// SI value of one atomic unit.
    fn atomic_unit_si(self) -> f64 {
        match self {
            Dimension::Length => BOHR_RADIUS_M,
            Dimension::Time => ATOMIC_TIME_S,
            Dimension::Velocity => ATOMIC_VELOCITY_M_PER_S,
            Dimension::Energy => HARTREE_J,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitQuantity {
    pub value: f64,
    pub dimension: Dimension,
    pub system: UnitSystem,
}

impl UnitQuantity {
    pub fn atomic(value: f64, dimension: Dimension) -> Self {
        UnitQuantity {
            value,
            dimension,
            system: UnitSystem::AtomicUnits,
        }
    }

    pub fn si(value: f64, dimension: Dimension) -> Self {
        UnitQuantity {
            value,
            dimension,
            system: UnitSystem::SI,
        }
    }
}

/// Converts between atomic units and SI.
pub fn unit_convert(q: UnitQuantity, target: UnitSystem) -> Result<UnitQuantity> {
    let factor = q.dimension.atomic_unit_si();
    let value = match (q.system, target) {
        (a, b) if a == b && a != UnitSystem::Natural => q.value,
        (UnitSystem::AtomicUnits, UnitSystem::SI) => q.value * factor,
        (UnitSystem::SI, UnitSystem::AtomicUnits) => q.value / factor,
        (from, to) => {
            return Err(Error::UnsupportedDimension(format!(
                "no conversion of {:?} from {from:?} to {to:?}",
                q.dimension
            )))
        }
    };
    Ok(UnitQuantity {
        value,
        dimension: q.dimension,
        system: target,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComptonVariant {
    HOverMc,
    HbarOverMc,
    HbarOver2mc,
}

pub fn compton_wavelength(variant: ComptonVariant, k: &PhysConsts) -> Result<UnitQuantity> {
    let hbar_mc = k.compton_length();
    let value = match variant {
        ComptonVariant::HOverMc => 2.0 * PI * hbar_mc,
        ComptonVariant::HbarOverMc => hbar_mc,
        ComptonVariant::HbarOver2mc => 0.5 * hbar_mc,
    };
    Ok(UnitQuantity {
        value,
        dimension: Dimension::Length,
        system: k.system,
    })
}

/// Rounds to `digits` significant figures.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits as i32 - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Speed from a separation and elapsed time given in atomic units, carried
/// out as a hand calculation: each quantity is converted to SI and rounded to
/// two significant figures before dividing.
pub fn rounded_si_speed(separation_au: f64, elapsed_au: f64) -> Result<f64> {
    let x = unit_convert(
        UnitQuantity::atomic(separation_au, Dimension::Length),
        UnitSystem::SI,
    )?;
    let t = unit_convert(
        UnitQuantity::atomic(elapsed_au, Dimension::Time),
        UnitSystem::SI,
    )?;
    Ok(round_sig(round_sig(x.value, 2) / round_sig(t.value, 2), 2))
}

/// One labelled calculator output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalcEntry {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

/// Every calculator quantity for the system of `k`.
pub fn calc_table(k: &PhysConsts) -> Result<Vec<CalcEntry>> {
    let energy = |name: &str, r: &EnergyResult| CalcEntry {
        name: name.into(),
        value: r.value,
        unit: match r.unit {
            EnergyUnit::Hartree => "hartree",
            EnergyUnit::EV => "eV",
            EnergyUnit::Joule => "J",
        }
        .into(),
    };
    let (length_unit, potential_unit) = match k.system {
        UnitSystem::AtomicUnits => ("bohr", "hartree/e"),
        UnitSystem::SI => ("m", "V"),
        UnitSystem::Natural => ("hbar/mc", "mc^2/e"),
    };
    let zb = zb_self_energy(k);
    let shell = shell_model_energy(0.5 * k.compton_length(), k)?;
    let darwin = darwin_shift_s_state(1, 1, 0, k)?;
    let mut rows = vec![
        CalcEntry {
            name: "fine_structure".into(),
            value: k.fine_structure(),
            unit: "1".into(),
        },
        CalcEntry {
            name: "self_potential".into(),
            value: self_potential(k),
            unit: potential_unit.into(),
        },
        energy("zb_self_energy", &zb),
        energy("zb_self_energy_ev", &zb.to_unit(EnergyUnit::EV)),
        CalcEntry {
            name: "electromagnetic_mass_ratio".into(),
            value: electromagnetic_mass(k) / k.m,
            unit: "1".into(),
        },
        energy("shell_model_energy", &shell),
        energy("darwin_shift_1s", &darwin.shift),
        energy("darwin_shift_1s_conventional", &darwin.conventional),
    ];
    for (name, v) in [
        ("compton_h_over_mc", ComptonVariant::HOverMc),
        ("compton_hbar_over_mc", ComptonVariant::HbarOverMc),
        ("compton_hbar_over_2mc", ComptonVariant::HbarOver2mc),
    ] {
        rows.push(CalcEntry {
            name: name.into(),
            value: compton_wavelength(v, k)?.value,
            unit: length_unit.into(),
        });
    }
    Ok(rows)
}
