//! Linear-channel resolvent in closed form.
//!
//! With ℓ = (2μ|F|)^{−1/3}, turning point x_t (complex, V(x_t) = E) and
//! ξ(x) = sign(F)·(x − x_t)/ℓ, the retarded kernel is
//!
//! G(x, x0; E) = −2πμℓ · Ai(ξ(x_up)) · [Bi + iAi](ξ(x_down))
//!
//! where x_up is whichever argument lies further uphill. The outgoing
//! combination is evaluated as Bi(ξ) + iAi(ξ) = 2i·e^{−iπ/3}·Ai(e^{2πi/3}ξ),
//! which stays accurate where it is exponentially small.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::specfun::airy::{airy_ai, AIRY_MAX_MODULUS};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearResolvent {
    mu: f64,
    slope: f64,
    anchor: f64,
    anchor_energy: f64,
    length: f64,
}

impl LinearResolvent {
    pub fn new(potential: &PotentialSpec) -> Result<Self> {
        potential.validate()?;
        match *potential {
            PotentialSpec::Linear { mass, slope, anchor, anchor_energy } => {
                let mu = units::effective_mass(mass);
                let length = (2.0 * mu * slope.abs()).powf(-1.0 / 3.0);
                Ok(Self { mu, slope, anchor, anchor_energy, length })
            }
            PotentialSpec::Harmonic { .. } | PotentialSpec::Flat { .. } => {
                Err(Error::domain("potential", "Airy closed form needs a linear potential"))
            }
        }
    }

    /// Airy length scale ℓ in Å.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Scaled coordinate ξ(x) for energy E.
    pub fn scaled(&self, x: f64, energy: Complex64) -> Complex64 {
        let turning = self.anchor + (energy - self.anchor_energy) / self.slope;
        (Complex64::new(x, 0.0) - turning) * (self.slope.signum() / self.length)
    }

    pub fn value(&self, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
        if !(energy.re.is_finite() && energy.im.is_finite()) || energy.im < 0.0 {
            return Err(Error::domain("energy", format!("need finite E with Im E >= 0, got {energy}")));
        }
        let (up, down) = if (x >= x0) == (self.slope > 0.0) { (x, x0) } else { (x0, x) };
        let xi_up = self.scaled(up, energy);
        let xi_down = self.scaled(down, energy);
        for xi in [xi_up, xi_down] {
            if xi.norm() > AIRY_MAX_MODULUS {
                return Err(Error::Accuracy(format!(
                    "scaled Airy argument |xi| = {:.2} exceeds {AIRY_MAX_MODULUS}; \
                     use the grid-oracle method for this range",
                    xi.norm()
                )));
            }
        }
        let decaying = airy_ai(xi_up)?;
        let outgoing = outgoing_wave(xi_down)?;
        Ok(decaying * outgoing * (-2.0 * PI * self.mu * self.length))
    }
}

/// Bi(ξ) + i·Ai(ξ).
pub fn outgoing_wave(xi: Complex64) -> Result<Complex64> {
    let rot = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let phase = Complex64::new(0.0, 2.0) * Complex64::from_polar(1.0, -PI / 3.0);
    Ok(phase * airy_ai(rot * xi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{airy_ai, airy_bi};

    fn fig23_forbidden(slope: f64) -> PotentialSpec {
        PotentialSpec::Linear { mass: 35.4, slope, anchor: 0.02477, anchor_energy: 10804.1 }
    }

    #[test]
    fn outgoing_combination_identity() {
        for &(re, im) in &[(-3.0, -0.4), (1.5, 2.0), (-10.0, -1.0), (4.0, -6.0)] {
            let z = Complex64::new(re, im);
            let direct = airy_bi(z).unwrap() + Complex64::i() * airy_ai(z).unwrap();
            let via = outgoing_wave(z).unwrap();
            assert!((direct - via).norm() < 1e-12 * direct.norm(), "{z}");
        }
    }

    #[test]
    fn symmetric_and_absorptive() {
        for slope in [-25000.0, 25000.0, -5000.0] {
            let g = LinearResolvent::new(&fig23_forbidden(slope)).unwrap();
            let e = Complex64::new(11200.0, 450.0);
            assert_eq!(g.value(0.0, 0.1, e).unwrap(), g.value(0.1, 0.0, e).unwrap());
            for x in [-0.2, 0.0, 0.02477, 0.3] {
                assert!(g.value(x, x, e).unwrap().im < 0.0);
            }
        }
    }

    #[test]
    fn rejects_harmonic_and_far_arguments() {
        let h = PotentialSpec::Harmonic { mass: 1.0, frequency: 1.0, center: 0.0, min_energy: 0.0 };
        assert!(LinearResolvent::new(&h).is_err());
        let g = LinearResolvent::new(&fig23_forbidden(-25000.0)).unwrap();
        let err = g.value(-5.0, 0.0, Complex64::new(11000.0, 450.0)).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)));
    }
}
