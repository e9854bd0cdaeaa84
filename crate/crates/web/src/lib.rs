//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! The plain functions do the work and are tested natively; the
//! `#[wasm_bindgen]` wrappers only translate errors.

use crosspec_core::config::{parse_job_with_overrides, JobConfig, Observable};
use crosspec_core::greens::CoupledGreens;
use crosspec_core::spectra::SpectrumEngine;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

const BASE_JOB: &str = include_str!("../../../jobs/fig23.job");

/// Slider-controlled knobs on top of the bundled job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knobs {
    pub slope: f64,
    pub k0: f64,
    pub damping: f64,
}

fn job(knobs: Knobs, points: usize) -> Result<JobConfig, String> {
    let sets = [
        format!("forbidden.slope={}", knobs.slope),
        format!("coupling.K0={}", knobs.k0),
        format!("spectrum.damping={}", knobs.damping),
        format!("spectrum.points={points}"),
    ];
    parse_job_with_overrides(BASE_JOB, &sets).map_err(|e| e.to_string())
}

/// Concatenated `[omega; coupled; uncoupled]`, each `points` long.
pub fn spectrum_curves(knobs: Knobs, raman: bool, points: usize) -> Result<Vec<f64>, String> {
    let job = job(knobs, points)?;
    let observable = if raman { Observable::Raman } else { Observable::Absorption };
    let result = SpectrumEngine::new(&job).and_then(|e| e.sweep(observable)).map_err(|e| e.to_string())?;
    let mut out = result.omega;
    out.extend(result.coupled);
    out.extend(result.uncoupled);
    Ok(out)
}

/// `[x; |G11(x, x_c)|; |G21(x, x_c)|]` on `points` positions in [x_min, x_max].
pub fn kernel_curves(knobs: Knobs, omega: f64, x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || x_max.partial_cmp(&x_min) != Some(std::cmp::Ordering::Greater) {
        return Err("need at least 2 points and x_min < x_max".into());
    }
    let job = job(knobs, 2)?;
    let greens = CoupledGreens::new(&job.two_channel()).map_err(|e| e.to_string())?;
    let e = Complex64::new(omega + 0.5 * job.ground.omega, job.spectrum.damping);
    let c = job.coupling.x_c;
    let xs: Vec<f64> = (0..points).map(|k| x_min + (x_max - x_min) * k as f64 / (points - 1) as f64).collect();
    let mut g11 = Vec::with_capacity(points);
    let mut g21 = Vec::with_capacity(points);
    for &x in &xs {
        g11.push(greens.element(0, 0, x, c, e).map_err(|e| e.to_string())?.norm());
        g21.push(greens.element(1, 0, x, c, e).map_err(|e| e.to_string())?.norm());
    }
    let mut out = xs;
    out.extend(g11);
    out.extend(g21);
    Ok(out)
}

/// `[x; ground; bound excited; repulsive]` potential curves in cm⁻¹.
pub fn potential_curves(knobs: Knobs, x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || x_max.partial_cmp(&x_min) != Some(std::cmp::Ordering::Greater) {
        return Err("need at least 2 points and x_min < x_max".into());
    }
    let job = job(knobs, 2)?;
    let spec = job.two_channel();
    let ground = job.ground_potential();
    let xs: Vec<f64> = (0..points).map(|k| x_min + (x_max - x_min) * k as f64 / (points - 1) as f64).collect();
    let mut out = xs.clone();
    out.extend(xs.iter().map(|&x| ground.value(x)));
    out.extend(xs.iter().map(|&x| spec.channel1.value(x)));
    out.extend(xs.iter().map(|&x| spec.channel2.value(x)));
    Ok(out)
}

#[wasm_bindgen]
pub fn spectrum(slope: f64, k0: f64, damping: f64, raman: bool, points: usize) -> Result<Vec<f64>, JsValue> {
    spectrum_curves(Knobs { slope, k0, damping }, raman, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn kernel_slice(slope: f64, k0: f64, damping: f64, omega: f64, x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    kernel_curves(Knobs { slope, k0, damping }, omega, x_min, x_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn potentials(slope: f64, x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    let knobs = Knobs { slope, k0: 0.0, damping: 1.0 };
    potential_curves(knobs, x_min, x_max, points).map_err(|e| JsValue::from_str(&e))
}
