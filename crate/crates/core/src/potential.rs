use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::OscillatorBasis;
use crate::units;

/// One diabatic curve. Energies in cm⁻¹, lengths in Å, mass in amu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// ½μω²(x − center)² + min_energy
    Harmonic { mass: f64, frequency: f64, center: f64, min_energy: f64 },
    /// anchor_energy + slope·(x − anchor)
    Linear { mass: f64, slope: f64, anchor: f64, anchor_energy: f64 },
    /// Constant `energy`; the free particle.
    Flat { mass: f64, energy: f64 },
}

impl PotentialSpec {
    pub fn mass(&self) -> f64 {
        match *self {
            PotentialSpec::Harmonic { mass, .. } | PotentialSpec::Linear { mass, .. } | PotentialSpec::Flat { mass, .. } => {
                mass
            }
        }
    }

    pub fn effective_mass(&self) -> f64 {
        units::effective_mass(self.mass())
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PotentialSpec::Harmonic { frequency, center, min_energy, .. } => {
                let mu = self.effective_mass();
                0.5 * mu * frequency * frequency * (x - center).powi(2) + min_energy
            }
            PotentialSpec::Linear { slope, anchor, anchor_energy, .. } => anchor_energy + slope * (x - anchor),
            PotentialSpec::Flat { energy, .. } => energy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match *self {
            PotentialSpec::Harmonic { mass, frequency, center, min_energy } => {
                if !(mass > 0.0) || !finite(mass) {
                    return Err(Error::domain("mass", format!("must be positive, got {mass}")));
                }
                if !(frequency > 0.0) || !finite(frequency) {
                    return Err(Error::domain("frequency", format!("must be positive, got {frequency}")));
                }
                if !finite(center) || !finite(min_energy) {
                    return Err(Error::domain("harmonic", "non-finite parameter"));
                }
            }
            PotentialSpec::Linear { mass, slope, anchor, anchor_energy } => {
                if !(mass > 0.0) || !finite(mass) {
                    return Err(Error::domain("mass", format!("must be positive, got {mass}")));
                }
                if slope == 0.0 || !finite(slope) {
                    return Err(Error::domain("slope", format!("must be finite and nonzero, got {slope}")));
                }
                if !finite(anchor) || !finite(anchor_energy) {
                    return Err(Error::domain("linear", "non-finite parameter"));
                }
            }
            PotentialSpec::Flat { mass, energy } => {
                if !(mass > 0.0) || !finite(mass) {
                    return Err(Error::domain("mass", format!("must be positive, got {mass}")));
                }
                if !finite(energy) {
                    return Err(Error::domain("energy", "non-finite parameter"));
                }
            }
        }
        Ok(())
    }

    pub fn oscillator_basis(&self) -> Option<OscillatorBasis> {
        match *self {
            PotentialSpec::Harmonic { mass, frequency, center, min_energy } => {
                OscillatorBasis::new(mass, frequency, center, min_energy).ok()
            }
            PotentialSpec::Linear { .. } | PotentialSpec::Flat { .. } => None,
        }
    }
}

/// Delta coupling K0·δ(x − position) between the two diabats. K0 in cm⁻¹·Å.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    pub strength: f64,
    pub position: f64,
}

/// Two diabats plus their coupling: the full excited-state Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoChannelSpec {
    pub channel1: PotentialSpec,
    pub channel2: PotentialSpec,
    pub coupling: CouplingSpec,
}

/// Resolvent argument for a photon of wavenumber `omega` absorbed from the
/// ground vibrational level: ω + ω0/2 + iΓ, on the same absolute energy scale
/// as the excited diabats (ground-state minimum at zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy(pub Complex64);

impl ComplexEnergy {
    pub fn from_photon(omega: f64, ground_frequency: f64, damping: f64) -> Self {
        ComplexEnergy(Complex64::new(omega + 0.5 * ground_frequency, damping))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<ComplexEnergy> for Complex64 {
    fn from(e: ComplexEnergy) -> Self {
        e.0
    }
}
