//! Harmonic-channel resolvent from its eigenfunction expansion.
//!
//! The bare sum Σ φ_n(x)φ_n(x0)/(E − E_n) converges like n^{-3/2} on the
//! diagonal. With u = n + 1, w = (E − E_min)/ω + ½ the identity
//!
//! 1/(w − u) = −Σ_{k=1}^{K} w^{k−1}/u^k + w^K / (u^K (w − u))
//!
//! splits it into K energy-independent moments S_k = Σ ψ_nψ_n / u^k, which
//! are integrals of the Mehler kernel, plus a remainder decaying like
//! n^{−K−3/2}.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{hermite_functions, quad, OscillatorBasis};

pub const DEFAULT_TERMS: usize = 400;
pub const DEFAULT_MOMENTS: usize = 4;
pub const MAX_MOMENTS: usize = 6;
/// The last retained level must lie this many quanta above Re E.
pub const ENERGY_MARGIN_QUANTA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicResolvent {
    basis: OscillatorBasis,
    terms: usize,
    moments: usize,
}

/// Energy-independent part of the kernel at a fixed pair (x, x0).
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPoint {
    basis: OscillatorBasis,
    products: Vec<f64>,
    moments: Vec<f64>,
}

impl HarmonicResolvent {
    pub fn new(basis: OscillatorBasis, terms: usize, moments: usize) -> Result<Self> {
        if terms == 0 {
            return Err(Error::domain("terms", "spectral truncation must keep at least one level"));
        }
        if moments > MAX_MOMENTS {
            return Err(Error::domain("moments", format!("at most {MAX_MOMENTS} subtracted moments")));
        }
        Ok(Self { basis, terms, moments })
    }

    pub fn basis(&self) -> &OscillatorBasis {
        &self.basis
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn prepare(&self, x: f64, x0: f64) -> HarmonicPoint {
        let (lo, hi) = if x <= x0 { (x, x0) } else { (x0, x) };
        let xi = self.basis.reduced_coordinate(lo);
        let eta = self.basis.reduced_coordinate(hi);
        let nmax = self.terms - 1;
        let a = hermite_functions(nmax, xi);
        let b = hermite_functions(nmax, eta);
        let products = a.iter().zip(&b).map(|(p, q)| p * q).collect();
        let moments = mehler_moments(xi, eta, self.moments);
        HarmonicPoint { basis: self.basis, products, moments }
    }

    pub fn value(&self, x: f64, x0: f64, energy: Complex64) -> Result<Complex64> {
        self.prepare(x, x0).value(energy)
    }

    /// Value plus an estimate of the truncation error.
    pub fn value_with_error(&self, x: f64, x0: f64, energy: Complex64) -> Result<(Complex64, f64)> {
        self.prepare(x, x0).value_with_error(energy)
    }
}

impl HarmonicPoint {
    pub fn value(&self, energy: Complex64) -> Result<Complex64> {
        self.value_with_error(energy).map(|v| v.0)
    }

    pub fn value_with_error(&self, energy: Complex64) -> Result<(Complex64, f64)> {
        if !(energy.re.is_finite() && energy.im.is_finite()) {
            return Err(Error::domain("energy", format!("non-finite energy {energy}")));
        }
        if energy.im <= 0.0 {
            return Err(Error::domain("energy", format!("Im E must be positive, got {energy}")));
        }
        let omega = self.basis.frequency();
        let n_terms = self.products.len();
        let last = self.basis.energy(n_terms - 1);
        if last - energy.re < ENERGY_MARGIN_QUANTA * omega {
            return Err(Error::Accuracy(format!(
                "harmonic spectral sum: {n_terms} levels reach only {last:.1} cm^-1, \
                 need {ENERGY_MARGIN_QUANTA} quanta above Re E = {:.1}",
                energy.re
            )));
        }
        let w = (energy - self.basis.min_energy()) / omega + 0.5;
        let k = self.moments.len() as i32;
        let mut head = Complex64::new(0.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        for s in &self.moments {
            head -= wp * s;
            wp *= w;
        }
        // wp == w^K
        let mut tail = Complex64::new(0.0, 0.0);
        for (n, p) in self.products.iter().enumerate() {
            let u = (n + 1) as f64;
            tail += p / (u.powi(k) * (w - u));
        }
        let t = head + wp * tail;
        let nf = n_terms as f64;
        let bound = wp.norm() * 0.6 * nf.powf(-(k as f64) - 0.5) / (k as f64 + 0.5);
        let scale = 1.0 / (omega * self.basis.length());
        Ok((t * scale, bound * scale))
    }
}

/// S_k = Σ_n ψ_n(ξ)ψ_n(η)/(n+1)^k for k = 1..=count, from
/// S_k = ∫_0^∞ t^{k−1}/(k−1)! e^{−t} M(ξ, η; e^{−t}) dt with t = s².
pub fn mehler_moments(xi: f64, eta: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    let sum2 = xi * xi + eta * eta;
    let diff2 = (xi - eta).powi(2);
    let integrand = |s: f64| -> [f64; MAX_MOMENTS] {
        let mut v = [0.0; MAX_MOMENTS];
        if s <= 0.0 {
            if diff2 == 0.0 {
                // limit s → 0 of 2s·M: M ~ 1/(s·sqrt(2π))
                v[0] = (2.0 / PI).sqrt();
            }
            return v;
        }
        let t = s * s;
        let q = (-t).exp();
        let one_minus_q = -(-t).exp_m1();
        let one_plus_q = 1.0 + q;
        let expo = -(one_minus_q * sum2 / (2.0 * one_plus_q) + q * diff2 / (one_minus_q * one_plus_q));
        let mehler = (expo).exp() / (PI * one_minus_q * one_plus_q).sqrt();
        let mut w = 2.0 * s * q * mehler;
        for (k, slot) in v.iter_mut().enumerate().take(count) {
            if k > 0 {
                w *= t / k as f64;
            }
            *slot = w;
        }
        v
    };
    let s_max = 8.5;
    let panels = 48;
    let h = s_max / panels as f64;
    for i in 0..panels {
        let r = quad::integrate(&integrand, i as f64 * h, (i + 1) as f64 * h, 1e-14, 30);
        for k in 0..count {
            out[k] += r[k];
        }
    }
    out
}
