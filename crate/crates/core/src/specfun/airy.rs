//! Airy functions of complex argument.
//!
//! `Ai` is evaluated by one of three routes:
//!
//! * `|z| >= ASYMPTOTIC_RADIUS`: the large-argument expansions, using the
//!   single-exponential form for `|arg z| <= 2π/3` and the oscillatory form
//!   in `-z` otherwise.
//! * `|z| < ASYMPTOTIC_RADIUS`: the Maclaurin series, while its cancellation
//!   factor (sum of term moduli over the modulus of the result) stays below
//!   `MAX_CANCELLATION`.
//! * otherwise (recessive and oscillatory directions): Taylor integration of
//!   `w'' = z w` along the ray from the asymptotic circle inwards, where the
//!   wanted solution does not decay relative to its companion.
//!
//! `Bi` follows from the connection formula
//! `Bi(z) = e^{iπ/6} Ai(z e^{2πi/3}) + e^{-iπ/6} Ai(z e^{-2πi/3})`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest modulus accepted by the public functions.
pub const AIRY_MAX_MODULUS: f64 = 50.0;
/// Switchover radius between the series/ODE routes and the asymptotic expansions.
pub const ASYMPTOTIC_RADIUS: f64 = 8.0;

const MAX_CANCELLATION: f64 = 1e4;
const AI0: f64 = 0.355_028_053_887_817_24; // 3^{-2/3}/Γ(2/3)
const AIP0: f64 = 0.258_819_403_792_806_8; // 3^{-1/3}/Γ(1/3)
const ODE_STEP: f64 = 0.5;
const N_ASYMPTOTIC: usize = 80;

/// (Ai(z), Ai'(z)).
pub fn airy_ai_pair(z: Complex64) -> Result<(Complex64, Complex64)> {
    check_domain(z)?;
    let (ai, aip) = ai_pair_unchecked(z)?;
    if z.im == 0.0 {
        return Ok((Complex64::new(ai.re, 0.0), Complex64::new(aip.re, 0.0)));
    }
    Ok((ai, aip))
}

/// (Bi(z), Bi'(z)).
pub fn airy_bi_pair(z: Complex64) -> Result<(Complex64, Complex64)> {
    check_domain(z)?;
    let rot = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let (a_plus, ap_plus) = ai_pair_unchecked(z * rot)?;
    let (a_minus, ap_minus) = ai_pair_unchecked(z * rot.conj())?;
    let e6 = Complex64::from_polar(1.0, PI / 6.0);
    let bi = e6 * a_plus + e6.conj() * a_minus;
    let bip = e6 * rot * ap_plus + (e6 * rot).conj() * ap_minus;
    if z.im == 0.0 {
        return Ok((Complex64::new(bi.re, 0.0), Complex64::new(bip.re, 0.0)));
    }
    Ok((bi, bip))
}

pub fn airy_ai(z: Complex64) -> Result<Complex64> {
    airy_ai_pair(z).map(|p| p.0)
}

pub fn airy_ai_deriv(z: Complex64) -> Result<Complex64> {
    airy_ai_pair(z).map(|p| p.1)
}

pub fn airy_bi(z: Complex64) -> Result<Complex64> {
    airy_bi_pair(z).map(|p| p.0)
}

pub fn airy_bi_deriv(z: Complex64) -> Result<Complex64> {
    airy_bi_pair(z).map(|p| p.1)
}

fn check_domain(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("z", format!("non-finite Airy argument {z}")));
    }
    if z.norm() > AIRY_MAX_MODULUS * (1.0 + 1e-12) {
        return Err(Error::domain(
            "z",
            format!("|z| = {:.4} exceeds the Airy working radius {AIRY_MAX_MODULUS}", z.norm()),
        ));
    }
    Ok(())
}

fn ai_pair_unchecked(z: Complex64) -> Result<(Complex64, Complex64)> {
    let r = z.norm();
    if r >= ASYMPTOTIC_RADIUS {
        return Ok(asymptotic(z));
    }
    let (ai, aip, kappa) = maclaurin(z);
    if kappa <= MAX_CANCELLATION {
        return Ok((ai, aip));
    }
    let start = if r == 0.0 {
        Complex64::new(ASYMPTOTIC_RADIUS, 0.0)
    } else {
        z * (ASYMPTOTIC_RADIUS / r)
    };
    let (w, dw) = asymptotic(start);
    let (ai, aip) = integrate_ray(start, w, dw, z)?;
    if !(ai.re.is_finite() && ai.im.is_finite() && aip.re.is_finite() && aip.im.is_finite()) {
        return Err(Error::Accuracy(format!("Airy ODE continuation lost significance at z = {z}")));
    }
    Ok((ai, aip))
}

/// Maclaurin series, returning (Ai, Ai', cancellation factor).
pub(crate) fn maclaurin(z: Complex64) -> (Complex64, Complex64, f64) {
    let z3 = z * z * z;
    let one = Complex64::new(1.0, 0.0);
    // f = Σ a_k z^{3k}, g = Σ c_k z^{3k+1} and their derivatives.
    let (mut tf, mut tg, mut tfp, mut tgp) = (one, z, z * z * 0.5, one);
    let (mut f, mut g, mut fp, mut gp) = (tf, tg, tfp, tgp);
    let (mut sf, mut sg, mut sfp, mut sgp) = (1.0, z.norm(), tfp.norm(), 1.0);
    for k in 1..400 {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp *= z3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        f += tf;
        g += tg;
        gp += tgp;
        sf += tf.norm();
        sg += tg.norm();
        sgp += tgp.norm();
        if k >= 2 {
            tfp *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp += tfp;
            sfp += tfp.norm();
        }
        let small = |t: Complex64, s: f64| t.norm() <= 1e-18 * s;
        if k > 2 && small(tf, sf) && small(tg, sg) && small(tfp, sfp.max(1e-300)) && small(tgp, sgp) {
            break;
        }
    }
    let ai = AI0 * f - AIP0 * g;
    let aip = AI0 * fp - AIP0 * gp;
    let k_val = (AI0 * sf + AIP0 * sg) / ai.norm();
    let k_der = (AI0 * sfp + AIP0 * sgp) / aip.norm();
    let kappa = k_val.max(k_der);
    (ai, aip, if kappa.is_finite() { kappa } else { f64::INFINITY })
}

fn coefficients() -> &'static ([f64; N_ASYMPTOTIC], [f64; N_ASYMPTOTIC]) {
    static COEFFS: OnceLock<([f64; N_ASYMPTOTIC], [f64; N_ASYMPTOTIC])> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut u = [0.0; N_ASYMPTOTIC];
        let mut v = [0.0; N_ASYMPTOTIC];
        u[0] = 1.0;
        v[0] = 1.0;
        for k in 1..N_ASYMPTOTIC {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        (u, v)
    })
}

/// Σ_k (−1)^k c_{start + 2k·stride...} style partial sums, truncated at the
/// smallest term. `terms(k)` yields the k-th term.
fn truncated_sum(mut term: impl FnMut(usize) -> Complex64, count: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..count {
        let t = term(k);
        let m = t.norm();
        if m > last {
            break;
        }
        sum += t;
        if m <= 1e-17 * sum.norm() {
            break;
        }
        last = m;
    }
    sum
}

pub(crate) fn asymptotic(z: Complex64) -> (Complex64, Complex64) {
    let (u, v) = coefficients();
    let sqrt_pi = PI.sqrt();
    if z.arg().abs() <= 2.0 * PI / 3.0 {
        let zeta = z.powf(1.5) * (2.0 / 3.0);
        let inv = 1.0 / zeta;
        let mut p = Complex64::new(1.0, 0.0);
        let s_u = truncated_sum(
            |k| {
                if k > 0 {
                    p *= -inv;
                }
                p * u[k]
            },
            N_ASYMPTOTIC,
        );
        let mut p = Complex64::new(1.0, 0.0);
        let s_v = truncated_sum(
            |k| {
                if k > 0 {
                    p *= -inv;
                }
                p * v[k]
            },
            N_ASYMPTOTIC,
        );
        let e = (-zeta).exp();
        let q = z.powf(0.25);
        let ai = e / (2.0 * sqrt_pi * q) * s_u;
        let aip = -q * e / (2.0 * sqrt_pi) * s_v;
        (ai, aip)
    } else {
        let w = -z;
        let zeta = w.powf(1.5) * (2.0 / 3.0);
        let inv = 1.0 / zeta;
        let inv2 = inv * inv;
        let half = N_ASYMPTOTIC / 2;
        let series = |c: &[f64; N_ASYMPTOTIC], odd: usize| {
            let mut p = if odd == 1 { inv } else { Complex64::new(1.0, 0.0) };
            truncated_sum(
                |k| {
                    if k > 0 {
                        p *= -inv2;
                    }
                    p * c[2 * k + odd]
                },
                half,
            )
        };
        let (pu, qu, pv, qv) = (series(u, 0), series(u, 1), series(v, 0), series(v, 1));
        let phase = zeta - FRAC_PI_4;
        let (c, s) = (phase.cos(), phase.sin());
        let q = w.powf(0.25);
        let ai = (c * pu + s * qu) / (sqrt_pi * q);
        let aip = q / sqrt_pi * (s * pv - c * qv);
        (ai, aip)
    }
}

/// Integrates w'' = z·w from `z0` (value `w`, slope `dw`) to `z1` by
/// re-expanded Taylor series along the straight segment.
fn integrate_ray(z0: Complex64, mut w: Complex64, mut dw: Complex64, z1: Complex64) -> Result<(Complex64, Complex64)> {
    let span = z1 - z0;
    let steps = (span.norm() / ODE_STEP).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut zc = z0;
    for _ in 0..steps {
        let (nw, ndw) = taylor_step(zc, w, dw, h)?;
        w = nw;
        dw = ndw;
        zc += h;
    }
    Ok((w, dw))
}

fn taylor_step(z0: Complex64, w: Complex64, dw: Complex64, h: Complex64) -> Result<(Complex64, Complex64)> {
    // a_{k+2} = (z0 a_k + a_{k-1}) / ((k+1)(k+2))
    let mut a_prev2 = w; // a_{k-1}
    let mut a_prev = dw; // a_k
    let a2 = z0 * w / 2.0;
    let mut a_cur = a2;
    let mut hk = h * h; // h^2
    let mut val = w + dw * h + a2 * hk;
    let mut der = dw + a2 * h * 2.0;
    let mut quiet = 0;
    for k in 3..300usize {
        // compute a_k from a_{k-2}, a_{k-3}
        let next = (z0 * a_prev + a_prev2) / ((k * (k - 1)) as f64);
        let dv = next * hk * h;
        let dd = next * hk * (k as f64);
        hk *= h;
        val += dv;
        der += dd;
        a_prev2 = a_prev;
        a_prev = a_cur;
        a_cur = next;
        if dv.norm() <= 1e-18 * val.norm() && dd.norm() <= 1e-18 * der.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok((val, der));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Accuracy(format!("Airy Taylor step from {z0} did not converge")))
}
