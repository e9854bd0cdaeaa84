//! Single-channel resolvents and the delta-coupled two-channel kernel.

pub mod harmonic;
pub mod linear;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, OracleSettings};
use crate::potential::{PotentialSpec, TwoChannelSpec};

pub use harmonic::{mehler_moments, HarmonicPoint, HarmonicResolvent};
pub use linear::{outgoing_wave, LinearResolvent};

/// |D| below which the coupled kernel is reported as sitting on a pole.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// How a single-channel kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Eigenfunction sum (harmonic channels only).
    SpectralSum { terms: usize, moments: usize },
    /// Airy-function closed form (linear channels only).
    AiryClosedForm,
    /// Plane-wave closed form (flat channels only).
    FreeClosedForm,
    /// Finite-difference solve with Richardson refinement; any channel.
    GridOracle(OracleSettings),
}

impl Method {
    pub fn default_for(potential: &PotentialSpec) -> Self {
        match potential {
            PotentialSpec::Harmonic { .. } => {
                Method::SpectralSum { terms: harmonic::DEFAULT_TERMS, moments: harmonic::DEFAULT_MOMENTS }
            }
            PotentialSpec::Linear { .. } => Method::AiryClosedForm,
            PotentialSpec::Flat { .. } => Method::FreeClosedForm,
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Harmonic(HarmonicResolvent),
    Linear(LinearResolvent),
    Free { mu: f64, level: f64 },
    Grid { potential: PotentialSpec, settings: OracleSettings, anchor: f64 },
}

/// G⁰(x, x0; E) for one uncoupled diabat.
#[derive(Debug, Clone)]
pub struct ChannelResolvent {
    potential: PotentialSpec,
    engine: Engine,
}

impl ChannelResolvent {
    pub fn new(potential: &PotentialSpec) -> Result<Self> {
        Self::with_method(potential, Method::default_for(potential), 0.0)
    }

    /// `anchor` only matters for the grid method: it fixes the node lattice.
    pub fn with_method(potential: &PotentialSpec, method: Method, anchor: f64) -> Result<Self> {
        potential.validate()?;
        let engine = match (method, potential) {
            (Method::SpectralSum { terms, moments }, PotentialSpec::Harmonic { .. }) => {
                let basis = potential
                    .oscillator_basis()
                    .ok_or_else(|| Error::domain("potential", "invalid harmonic parameters"))?;
                Engine::Harmonic(HarmonicResolvent::new(basis, terms, moments)?)
            }
            (Method::AiryClosedForm, PotentialSpec::Linear { .. }) => Engine::Linear(LinearResolvent::new(potential)?),
            (Method::FreeClosedForm, &PotentialSpec::Flat { energy, .. }) => {
                Engine::Free { mu: potential.effective_mass(), level: energy }
            }
            (Method::GridOracle(settings), _) => Engine::Grid { potential: *potential, settings, anchor },
            (m, p) => return Err(Error::domain("method", format!("{m:?} does not apply to {p:?}"))),
        };
        Ok(Self { potential: *potential, engine })
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn value(&self, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
        match &self.engine {
            Engine::Harmonic(h) => h.value(x, x0, energy),
            Engine::Linear(l) => l.value(x, x0, energy),
            Engine::Free { mu, level } => free_particle(*mu, x, x0, energy - *level),
            Engine::Grid { potential, settings, anchor } => {
                Ok(grid::refined_kernel(settings, potential, energy, *anchor, x, x0)?.value)
            }
        }
    }
}

/// −iμ e^{ik|x−x0|}/k with k = √(2μE), Im k > 0.
pub fn free_particle(mu: f64, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
    if energy.im < 0.0 || (energy.im == 0.0 && energy.re <= 0.0) {
        return Err(Error::domain("energy", format!("free resolvent needs Im E > 0 or E > 0, got {energy}")));
    }
    let k = (2.0 * mu * energy).sqrt();
    let i = Complex64::i();
    Ok(-i * mu * (i * k * (x - x0).abs()).exp() / k)
}

/// Harmonic-diabat kernel by the default spectral method.
pub fn g0_harmonic(potential: &PotentialSpec, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
    match potential {
        PotentialSpec::Harmonic { .. } => ChannelResolvent::new(potential)?.value(x, x0, energy),
        _ => Err(Error::domain("potential", "expected a harmonic diabat")),
    }
}

/// Linear-diabat kernel in closed form.
pub fn g0_linear(potential: &PotentialSpec, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
    LinearResolvent::new(potential)?.value(x, x0, energy)
}

/// Exact resolvent of two diabats joined by K0·δ(x − x_c).
#[derive(Debug, Clone)]
pub struct CoupledGreens {
    spec: TwoChannelSpec,
    channels: [ChannelResolvent; 2],
}

impl CoupledGreens {
    pub fn new(spec: &TwoChannelSpec) -> Result<Self> {
        let m1 = Method::default_for(&spec.channel1);
        let m2 = Method::default_for(&spec.channel2);
        Self::with_methods(spec, m1, m2)
    }

    pub fn with_methods(spec: &TwoChannelSpec, first: Method, second: Method) -> Result<Self> {
        if !spec.coupling.strength.is_finite() || !spec.coupling.position.is_finite() {
            return Err(Error::domain("coupling", "non-finite coupling parameters"));
        }
        let c = spec.coupling.position;
        Ok(Self {
            spec: *spec,
            channels: [
                ChannelResolvent::with_method(&spec.channel1, first, c)?,
                ChannelResolvent::with_method(&spec.channel2, second, c)?,
            ],
        })
    }

    pub fn spec(&self) -> &TwoChannelSpec {
        &self.spec
    }

    pub fn channel(&self, index: usize) -> &ChannelResolvent {
        &self.channels[index]
    }

    /// Uncoupled kernel of channel `index` (0 or 1).
    pub fn g0(&self, index: usize, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
        self.channels[index].value(x, x0, energy)
    }

    /// (G1⁰(c,c), G2⁰(c,c)) at the coupling point.
    pub fn diagonal_at_crossing(&self, energy: Complex64) -> Result<(Complex64, Complex64)> {
        let c = self.spec.coupling.position;
        Ok((self.g0(0, c, c, energy)?, self.g0(1, c, c, energy)?))
    }

    /// D(E) = 1 − K0² G1⁰(c,c) G2⁰(c,c).
    pub fn denominator(&self, energy: Complex64) -> Result<Complex64> {
        let (g1, g2) = self.diagonal_at_crossing(energy)?;
        let k0 = self.spec.coupling.strength;
        Ok(1.0 - k0 * k0 * g1 * g2)
    }

    /// Element G_{target,source}(x, x0; E) for channel indices 0/1.
    pub fn element(&self, target: usize, source: usize, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
        if target > 1 || source > 1 {
            return Err(Error::domain("channel", format!("indices must be 0 or 1, got ({target}, {source})")));
        }
        let k0 = self.spec.coupling.strength;
        if k0 == 0.0 {
            return if target == source {
                self.g0(source, x, x0, energy)
            } else {
                Ok(Complex64::new(0.0, 0.0))
            };
        }
        let c = self.spec.coupling.position;
        let other = 1 - source;
        let ga_cc = self.g0(source, c, c, energy)?;
        let gb_cc = self.g0(other, c, c, energy)?;
        let d = self.check_pole(1.0 - k0 * k0 * ga_cc * gb_cc, energy)?;
        let ga_c_x0 = self.g0(source, c, x0, energy)?;
        if target == source {
            let direct = self.g0(source, x, x0, energy)?;
            let ga_x_c = self.g0(source, x, c, energy)?;
            Ok(direct + k0 * k0 * ga_x_c * gb_cc * ga_c_x0 / d)
        } else {
            let gb_x_c = self.g0(other, x, c, energy)?;
            Ok(k0 * gb_x_c * ga_c_x0 / d)
        }
    }

    /// Full 2×2 kernel, indexed [target][source].
    pub fn kernel(&self, x: f64, x0: f64, energy: Complex64) -> Result<[[Complex64; 2]; 2]> {
        let zero = Complex64::new(0.0, 0.0);
        let k0 = self.spec.coupling.strength;
        let g1 = self.g0(0, x, x0, energy)?;
        let g2 = self.g0(1, x, x0, energy)?;
        if k0 == 0.0 {
            return Ok([[g1, zero], [zero, g2]]);
        }
        let c = self.spec.coupling.position;
        let (g1cc, g2cc) = self.diagonal_at_crossing(energy)?;
        let d = self.check_pole(1.0 - k0 * k0 * g1cc * g2cc, energy)?;
        let g1xc = self.g0(0, x, c, energy)?;
        let g2xc = self.g0(1, x, c, energy)?;
        let g1cx0 = self.g0(0, c, x0, energy)?;
        let g2cx0 = self.g0(1, c, x0, energy)?;
        Ok([
            [g1 + k0 * k0 * g1xc * g2cc * g1cx0 / d, k0 * g1xc * g2cx0 / d],
            [k0 * g2xc * g1cx0 / d, g2 + k0 * k0 * g2xc * g1cc * g2cx0 / d],
        ])
    }

    fn check_pole(&self, d: Complex64, energy: Complex64) -> Result<Complex64> {
        if d.norm() < POLE_THRESHOLD || !d.is_finite() {
            return Err(Error::NearPole { energy, magnitude: d.norm() });
        }
        Ok(d)
    }
}
