//! Absorption spectra and resonance Raman excitation profiles.
//!
//! With the initial and final wavepackets expanded in the allowed-diabat
//! eigenbasis, every matrix element of the coupled resolvent reduces to
//! Franck–Condon sums plus one rank-one correction through the crossing:
//!
//! A = A₀ + K0² G2⁰(c,c) f_i² / D,   R = R₀ + K0² G2⁰(c,c) f_f f_i / D,
//!
//! with f_n = Σ_k ⟨χ_n|φ_k⟩ φ_k(x_c) / (E − E_k).

use num_complex::Complex64;

pub use crate::config::{Normalization, Observable};
use crate::config::JobConfig;
use crate::error::{Error, Result};
use crate::greens::{HarmonicPoint, HarmonicResolvent, LinearResolvent, POLE_THRESHOLD};
use crate::potential::ComplexEnergy;
use crate::specfun::{fc_overlap_table, OscillatorBasis, EIGENFUNCTION_CAP};

/// Franck–Condon sums stop once the retained weight reaches 1 − this.
pub const FC_COMPLETENESS: f64 = 1e-14;
pub const FC_MIN_LEVELS: usize = 40;

/// Coupled and uncoupled values of one amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub coupled: Complex64,
    pub uncoupled: Complex64,
}

/// Precomputed, immutable evaluator for one job.
#[derive(Debug, Clone)]
pub struct SpectrumEngine {
    job: JobConfig,
    ground: OscillatorBasis,
    allowed: OscillatorBasis,
    energies: Vec<f64>,
    /// ⟨χ_i|φ_k⟩ and ⟨χ_f|φ_k⟩
    initial: Vec<f64>,
    final_: Vec<f64>,
    /// φ_k(x_c)
    at_crossing: Vec<f64>,
    g1_cc: HarmonicPoint,
    g2: LinearResolvent,
}

impl SpectrumEngine {
    pub fn new(job: &JobConfig) -> Result<Self> {
        let spec = job.two_channel();
        let ground = OscillatorBasis::new(job.ground.mass, job.ground.omega, 0.0, 0.0)?;
        let allowed = spec
            .channel1
            .oscillator_basis()
            .ok_or_else(|| Error::config("allowed", "invalid allowed-diabat parameters"))?;
        let (i, f) = (job.spectrum.initial, job.spectrum.raman_final);
        if i.max(f) >= EIGENFUNCTION_CAP {
            return Err(Error::config("spectrum.raman_final", format!("vibrational quantum numbers must be below {EIGENFUNCTION_CAP}")));
        }
        let top = i.max(f);
        let mut levels = FC_MIN_LEVELS;
        let table = loop {
            let t = fc_overlap_table(&ground, &allowed, top, levels - 1)?;
            let complete = [i, f].iter().all(|&n| {
                let w: f64 = t[n].iter().map(|o| o * o).sum();
                w >= 1.0 - FC_COMPLETENESS
            });
            if complete {
                break t;
            }
            if levels == EIGENFUNCTION_CAP {
                return Err(Error::Accuracy(format!(
                    "Franck-Condon sum not complete to {FC_COMPLETENESS:e} within {EIGENFUNCTION_CAP} levels"
                )));
            }
            levels = (2 * levels).min(EIGENFUNCTION_CAP);
        };
        let x_c = job.coupling.x_c;
        let harmonic = HarmonicResolvent::new(
            allowed,
            crate::greens::harmonic::DEFAULT_TERMS,
            crate::greens::harmonic::DEFAULT_MOMENTS,
        )?;
        Ok(Self {
            job: job.clone(),
            ground,
            allowed,
            energies: (0..levels).map(|k| allowed.energy(k)).collect(),
            initial: table[i].clone(),
            final_: table[f].clone(),
            at_crossing: allowed.eigenfunctions(levels - 1, x_c),
            g1_cc: harmonic.prepare(x_c, x_c),
            g2: LinearResolvent::new(&spec.channel2)?,
        })
    }

    pub fn job(&self) -> &JobConfig {
        &self.job
    }

    pub fn ground_basis(&self) -> &OscillatorBasis {
        &self.ground
    }

    pub fn allowed_basis(&self) -> &OscillatorBasis {
        &self.allowed
    }

    /// Number of allowed-diabat levels kept in the Franck–Condon sums.
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn energy(&self, omega: f64) -> Complex64 {
        ComplexEnergy::from_photon(omega, self.job.ground.omega, self.job.spectrum.damping).value()
    }

    fn sums(&self, e: Complex64, bra: &[f64], ket: &[f64]) -> (Complex64, Complex64, Complex64) {
        // direct, bra-side and ket-side crossing projections, fixed order
        let mut direct = Complex64::new(0.0, 0.0);
        let mut fb = Complex64::new(0.0, 0.0);
        let mut fk = Complex64::new(0.0, 0.0);
        for k in 0..self.energies.len() {
            let r = 1.0 / (e - self.energies[k]);
            direct += bra[k] * ket[k] * r;
            fb += bra[k] * self.at_crossing[k] * r;
            fk += ket[k] * self.at_crossing[k] * r;
        }
        (direct, fb, fk)
    }

    fn amplitude(&self, omega: f64, bra: &[f64], ket: &[f64]) -> Result<Amplitudes> {
        let e = self.energy(omega);
        let (direct, fb, fk) = self.sums(e, bra, ket);
        let k0 = self.job.coupling.k0;
        if k0 == 0.0 {
            return Ok(Amplitudes { coupled: direct, uncoupled: direct });
        }
        let c = self.job.coupling.x_c;
        let g1 = self.g1_cc.value(e)?;
        let g2 = self.g2.value(c, c, e)?;
        let d = 1.0 - k0 * k0 * g1 * g2;
        if d.norm() < POLE_THRESHOLD || !d.is_finite() {
            return Err(Error::NearPole { energy: e, magnitude: d.norm() });
        }
        Ok(Amplitudes { coupled: direct + k0 * k0 * g2 * fb * fk / d, uncoupled: direct })
    }

    /// ⟨χ_i|G11|χ_i⟩ at photon wavenumber `omega`.
    pub fn absorption_amplitude(&self, omega: f64) -> Result<Amplitudes> {
        self.amplitude(omega, &self.initial, &self.initial)
    }

    /// ⟨χ_f|G11|χ_i⟩ at excitation wavenumber `omega`.
    pub fn raman_amplitude(&self, omega: f64) -> Result<Amplitudes> {
        self.amplitude(omega, &self.final_, &self.initial)
    }

    /// True when the Raman final state equals the initial one.
    pub fn is_rayleigh(&self) -> bool {
        self.job.spectrum.initial == self.job.spectrum.raman_final
    }

    /// Unnormalized (coupled, uncoupled) intensities.
    pub fn intensities(&self, observable: Observable, omega: f64) -> Result<(f64, f64)> {
        Ok(match observable {
            Observable::Absorption => {
                let a = self.absorption_amplitude(omega)?;
                (-a.coupled.im, -a.uncoupled.im)
            }
            Observable::Raman => {
                let r = self.raman_amplitude(omega)?;
                (r.coupled.norm_sqr(), r.uncoupled.norm_sqr())
            }
        })
    }

    /// Evaluates the job's frequency grid; both variants, normalized.
    pub fn sweep(&self, observable: Observable) -> Result<SpectrumResult> {
        let omega = self.job.spectrum.frequencies();
        let raw = evaluate_all(&omega, |w| self.intensities(observable, w))?;
        let (coupled, uncoupled): (Vec<f64>, Vec<f64>) = raw.into_iter().unzip();
        let mode = self.job.spectrum.normalization;
        let normalization = match (mode, observable) {
            (Normalization::None, _) => 1.0,
            (Normalization::PeakUncoupled, _) | (Normalization::PeakUncoupledAbsorption, Observable::Absorption) => {
                peak(&uncoupled)
            }
            (Normalization::PeakUncoupledAbsorption, Observable::Raman) => {
                let absorption = evaluate_all(&omega, |w| Ok(-self.sums(self.energy(w), &self.initial, &self.initial).0.im))?;
                let p = peak(&absorption);
                p * p
            }
        };
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(Error::Accuracy(format!("normalization constant {normalization} is not positive")));
        }
        let scale = |v: Vec<f64>| v.into_iter().map(|x| x / normalization).collect::<Vec<_>>();
        Ok(SpectrumResult {
            observable,
            omega,
            coupled: scale(coupled),
            uncoupled: scale(uncoupled),
            normalization,
            mode,
            fingerprint: self.job.fingerprint(),
        })
    }
}

fn peak(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn evaluate_all<T, F>(omega: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    #[cfg(feature = "parallel")]
    let results: Vec<Result<T>> = {
        use rayon::prelude::*;
        omega.par_iter().map(|&w| f(w)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<T>> = omega.iter().map(|&w| f(w)).collect();
    results
        .into_iter()
        .zip(omega)
        .map(|(r, &w)| r.map_err(|e| Error::Sweep { omega: w, source: Box::new(e) }))
        .collect()
}

/// Normalized intensities on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub observable: Observable,
    pub omega: Vec<f64>,
    pub coupled: Vec<f64>,
    pub uncoupled: Vec<f64>,
    /// Raw intensities were divided by this.
    pub normalization: f64,
    pub mode: Normalization,
    pub fingerprint: String,
}

/// Relative L2 distance ‖a − b‖ / ‖b‖.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Indices of strict interior local maxima.
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1)).filter(|&k| v[k] > v[k - 1] && v[k] >= v[k + 1]).collect()
}
