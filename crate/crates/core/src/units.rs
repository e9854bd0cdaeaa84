//! Internal unit system: energies in cm⁻¹, lengths in Å, masses in amu, ħ = 1.
//!
//! With ħ = 1 the kinetic operator −ħ²/(2m)·∂² becomes −1/(2μ)·∂² where the
//! effective mass μ = m / [`KINETIC_CONSTANT`] carries the composite factor
//! ħ²/(amu·Å²·hc·1 cm⁻¹). Frequencies given as wavenumbers then enter the
//! Hamiltonian directly as energies.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Planck constant times the speed of light, erg·cm.
pub const HC_ERG_CM: f64 = 1.986445857e-16;
/// Reduced Planck constant, erg·s (CODATA 2018).
pub const HBAR_ERG_S: f64 = 1.054571817e-27;
/// Atomic mass unit, g (CODATA 2018).
pub const AMU_G: f64 = 1.66053906660e-24;
/// Electron volt, erg (exact).
pub const EV_ERG: f64 = 1.602176634e-12;
/// One ångström in cm.
pub const ANGSTROM_CM: f64 = 1e-8;

/// ħ²/(amu·Å²) expressed in cm⁻¹ (≈ 33.7153).
pub const KINETIC_CONSTANT: f64 =
    HBAR_ERG_S * HBAR_ERG_S / (AMU_G * ANGSTROM_CM * ANGSTROM_CM * HC_ERG_CM);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyUnit {
    Wavenumber,
    Erg,
    ElectronVolt,
}

impl EnergyUnit {
    /// Size of one unit in cm⁻¹.
    fn in_wavenumbers(self) -> f64 {
        match self {
            EnergyUnit::Wavenumber => 1.0,
            EnergyUnit::Erg => 1.0 / HC_ERG_CM,
            EnergyUnit::ElectronVolt => EV_ERG / HC_ERG_CM,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EnergyUnit::Wavenumber => "cm-1",
            EnergyUnit::Erg => "erg",
            EnergyUnit::ElectronVolt => "eV",
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cm-1" | "cm^-1" | "wavenumber" => Ok(EnergyUnit::Wavenumber),
            "erg" => Ok(EnergyUnit::Erg),
            "eV" | "ev" => Ok(EnergyUnit::ElectronVolt),
            other => Err(Error::config("unit", format!("unsupported energy unit `{other}`"))),
        }
    }
}

pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.in_wavenumbers() / to.in_wavenumbers()
}

/// String-keyed variant of [`convert_energy`], for unit names read from text.
pub fn convert_energy_named(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_energy(value, from.parse()?, to.parse()?))
}

/// Converts a mass in amu into the effective mass entering −1/(2μ)·∂².
pub fn effective_mass(mass_amu: f64) -> f64 {
    mass_amu / KINETIC_CONSTANT
}

/// Harmonic length scale sqrt(ħ/(mω)) in Å.
pub fn oscillator_length(mass_amu: f64, wavenumber: f64) -> f64 {
    (1.0 / (effective_mass(mass_amu) * wavenumber)).sqrt()
}
