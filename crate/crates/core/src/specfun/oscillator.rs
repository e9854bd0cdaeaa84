use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::quad;
use crate::units;

/// Highest quantum number accepted by [`OscillatorBasis::eigenfunction`].
pub const EIGENFUNCTION_CAP: usize = 512;

const RESCALE: f64 = 1e150;

/// Eigenbasis of −1/(2μ)∂² + ½μω²(x − center)² + min_energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorBasis {
    mass: f64,
    frequency: f64,
    center: f64,
    min_energy: f64,
    length: f64,
}

impl OscillatorBasis {
    pub fn new(mass: f64, frequency: f64, center: f64, min_energy: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain("mass", format!("mass must be positive, got {mass}")));
        }
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::domain("frequency", format!("frequency must be positive, got {frequency}")));
        }
        if !(center.is_finite() && min_energy.is_finite()) {
            return Err(Error::domain("center", "non-finite oscillator parameters"));
        }
        let length = units::oscillator_length(mass, frequency);
        Ok(Self { mass, frequency, center, min_energy, length })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn min_energy(&self) -> f64 {
        self.min_energy
    }

    /// sqrt(ħ/(mω)) in Å.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.min_energy + self.frequency * (n as f64 + 0.5)
    }

    pub fn reduced_coordinate(&self, x: f64) -> f64 {
        (x - self.center) / self.length
    }

    /// Normalized eigenfunction φ_n(x) in Å^{-1/2}.
    pub fn eigenfunction(&self, n: usize, x: f64) -> Result<f64> {
        if n > EIGENFUNCTION_CAP {
            return Err(Error::domain("n", format!("quantum number {n} above cap {EIGENFUNCTION_CAP}")));
        }
        Ok(self.eigenfunctions(n, x)[n])
    }

    /// φ_0(x), …, φ_nmax(x). Not subject to the public cap.
    pub fn eigenfunctions(&self, nmax: usize, x: f64) -> Vec<f64> {
        let norm = self.length.sqrt().recip();
        let mut out = hermite_functions(nmax, self.reduced_coordinate(x));
        for v in &mut out {
            *v *= norm;
        }
        out
    }
}

/// Normalized Hermite functions ψ_0(ξ), …, ψ_nmax(ξ) (∫ψ_n² dξ = 1) via the
/// two-term recurrence, with running rescaling so the Gaussian factor cannot
/// underflow before the polynomial growth catches up.
pub fn hermite_functions(nmax: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let mut log_scale = -0.5 * xi * xi;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let emit = |v: f64, ls: f64| if v == 0.0 { 0.0 } else { v * ls.exp() };
    out.push(emit(cur, log_scale));
    for n in 0..nmax {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(emit(cur, log_scale));
    }
    out
}

/// ⟨φ_na^A | φ_nb^B⟩.
pub fn fc_overlap(a: &OscillatorBasis, b: &OscillatorBasis, na: usize, nb: usize) -> Result<f64> {
    if same_frequency(a, b)? {
        Ok(displaced_table(a, b, na, nb)[na][nb])
    } else {
        Ok(overlap_by_quadrature(a, b, na, nb))
    }
}

/// Table `t[m][n] = ⟨φ_m^A | φ_n^B⟩` for m ≤ na_max, n ≤ nb_max.
pub fn fc_overlap_table(a: &OscillatorBasis, b: &OscillatorBasis, na_max: usize, nb_max: usize) -> Result<Vec<Vec<f64>>> {
    if same_frequency(a, b)? {
        Ok(displaced_table(a, b, na_max, nb_max))
    } else {
        Ok((0..=na_max)
            .map(|m| (0..=nb_max).map(|n| overlap_by_quadrature(a, b, m, n)).collect())
            .collect())
    }
}

fn same_frequency(a: &OscillatorBasis, b: &OscillatorBasis) -> Result<bool> {
    if (a.mass - b.mass).abs() > 1e-12 * a.mass {
        return Err(Error::domain(
            "basis",
            format!("overlaps between bases of different mass ({} vs {} amu) are unsupported", a.mass, b.mass),
        ));
    }
    Ok((a.frequency - b.frequency).abs() <= 1e-12 * a.frequency)
}

/// Equal-frequency displaced oscillators: ladder-operator recurrence with
/// λ = (c_B − c_A)/(√2·x_s) and |⟨0|n⟩|² = e^{−S}Sⁿ/n!, S = λ².
fn displaced_table(a: &OscillatorBasis, b: &OscillatorBasis, na_max: usize, nb_max: usize) -> Vec<Vec<f64>> {
    let lambda = (b.center - a.center) / (std::f64::consts::SQRT_2 * a.length);
    let mut t = vec![vec![0.0; nb_max + 1]; na_max + 1];
    t[0][0] = (-0.5 * lambda * lambda).exp();
    for n in 0..nb_max {
        t[0][n + 1] = -lambda * t[0][n] / ((n + 1) as f64).sqrt();
    }
    for m in 0..na_max {
        let inv = 1.0 / ((m + 1) as f64).sqrt();
        for n in 0..=nb_max {
            let down = if n > 0 { (n as f64).sqrt() * t[m][n - 1] } else { 0.0 };
            t[m + 1][n] = (down + lambda * t[m][n]) * inv;
        }
    }
    t
}

fn overlap_by_quadrature(a: &OscillatorBasis, b: &OscillatorBasis, na: usize, nb: usize) -> f64 {
    let reach = |o: &OscillatorBasis, n: usize| o.length * ((2 * n + 1) as f64).sqrt() + 12.0 * o.length;
    let lo = (a.center - reach(a, na)).min(b.center - reach(b, nb));
    let hi = (a.center + reach(a, na)).max(b.center + reach(b, nb));
    let f = |x: f64| [a.eigenfunctions(na, x)[na] * b.eigenfunctions(nb, x)[nb]];
    let pieces = 4 * (na.max(nb) + 4);
    let h = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| quad::integrate(&f, lo + i as f64 * h, lo + (i + 1) as f64 * h, 1e-13, 20)[0])
        .sum()
}
