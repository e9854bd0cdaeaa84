use crosspec_core::config::{parse_job_with_overrides, JobConfig};
use crosspec_core::grid::{self, GridOperator, GridSpec};
use crosspec_core::spectra::{local_maxima, Observable, SpectrumEngine};
use num_complex::Complex64;

const FIG23: &str = include_str!("../../../jobs/fig23.job");

fn job(overrides: &[&str]) -> JobConfig {
    let mut all = vec!["spectrum.points=401"];
    all.extend_from_slice(overrides);
    parse_job_with_overrides(FIG23, &all).unwrap()
}

// CGS constants used independently of the crate's unit module.
const HBAR: f64 = 1.054571817e-27;
const C_LIGHT: f64 = 2.99792458e10;
const AMU: f64 = 1.66053906660e-24;

/// Huang–Rhys factor S = mωd²/(2ħ).
fn huang_rhys(mass: f64, wavenumber: f64, d_angstrom: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * C_LIGHT * wavenumber;
    let d = d_angstrom * 1e-8;
    mass * AMU * omega * d * d / (2.0 * HBAR)
}

/// Oscillator length in Å.
fn length(mass: f64, wavenumber: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * C_LIGHT * wavenumber;
    (HBAR / (mass * AMU * omega)).sqrt() * 1e8
}

/// ⟨0|n⟩ and ⟨1|n⟩ for equal-frequency oscillators displaced by λ√2 lengths.
fn closed_form_overlaps(lambda: f64, n: usize) -> (f64, f64) {
    let mut log_fact = 0.0;
    for k in 2..=n {
        log_fact += (k as f64).ln();
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mag = (-0.5 * lambda * lambda + n as f64 * lambda.abs().ln() - 0.5 * log_fact).exp();
    let zero_n = sign * mag;
    // ⟨1|n⟩ = ⟨0|n⟩ (n − λ²)/(−λ)
    let one_n = zero_n * (n as f64 - lambda * lambda) / (-lambda);
    (zero_n, one_n)
}

fn chi(n: usize, mass: f64, wavenumber: f64, x: f64) -> f64 {
    let xs = length(mass, wavenumber);
    let t = x / xs;
    let g = (std::f64::consts::PI * xs * xs).powf(-0.25) * (-0.5 * t * t).exp();
    match n {
        0 => g,
        1 => std::f64::consts::SQRT_2 * t * g,
        _ => unreachable!(),
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn huang_rhys_factor() {
    let s = huang_rhys(35.4, 400.0, 0.1);
    assert!((s - 2.10).abs() < 0.01, "{s}");
}

#[test]
fn closed_form_overlaps_match_quadrature() {
    let (m, w, d) = (35.4, 400.0, 0.1);
    let xs = length(m, w);
    let lambda = d / (std::f64::consts::SQRT_2 * xs);
    // displaced eigenfunctions by upward Hermite recurrence on a fine grid
    let h = 1e-4;
    let xs_grid: Vec<f64> = (0..=16000).map(|j| -0.7 + j as f64 * h).collect();
    let mut prev = vec![0.0; xs_grid.len()];
    let mut cur: Vec<f64> = xs_grid.iter().map(|&x| chi(0, m, w, x - d)).collect();
    for n in 0..30 {
        let (zero_n, one_n) = closed_form_overlaps(lambda, n);
        let q0: f64 = xs_grid.iter().zip(&cur).map(|(&x, p)| chi(0, m, w, x) * p).sum::<f64>() * h;
        let q1: f64 = xs_grid.iter().zip(&cur).map(|(&x, p)| chi(1, m, w, x) * p).sum::<f64>() * h;
        assert!((q0 - zero_n).abs() < 1e-12 && (q1 - one_n).abs() < 1e-12, "n = {n}: {q0} {zero_n} {q1} {one_n}");
        let next: Vec<f64> = xs_grid
            .iter()
            .zip(cur.iter().zip(&prev))
            .map(|(&x, (c, p))| {
                let t = (x - d) / xs;
                (2.0f64 / (n + 1) as f64).sqrt() * t * c - (n as f64 / (n + 1) as f64).sqrt() * p
            })
            .collect();
        prev = cur;
        cur = next;
    }
}

#[test]
fn uncoupled_absorption_is_poisson_lorentzian_sum() {
    let j = job(&["coupling.K0=0"]);
    let engine = SpectrumEngine::new(&j).unwrap();
    let s = huang_rhys(35.4, 400.0, 0.1);
    for &w in &j.spectrum.frequencies() {
        let e = Complex64::new(w + 200.0, 450.0);
        let mut oracle = 0.0;
        let mut log_weight = -s;
        for n in 0..120 {
            if n > 0 {
                log_weight += s.ln() - (n as f64).ln();
            }
            let en = 10700.0 + 400.0 * (n as f64 + 0.5);
            oracle += -(log_weight.exp() / (e - en)).im;
        }
        let (coupled, uncoupled) = engine.intensities(Observable::Absorption, w).unwrap();
        assert!((uncoupled - oracle).abs() <= 1e-8 * oracle, "{w}: {uncoupled} vs {oracle}");
        assert_eq!(coupled, uncoupled);
    }
}

#[test]
fn uncoupled_raman_is_sum_over_states() {
    let j = job(&["coupling.K0=0"]);
    let engine = SpectrumEngine::new(&j).unwrap();
    let lambda = 0.1 / (std::f64::consts::SQRT_2 * length(35.4, 400.0));
    for &w in &j.spectrum.frequencies() {
        let e = Complex64::new(w + 200.0, 450.0);
        let mut r = Complex64::new(0.0, 0.0);
        for n in 0..=80 {
            let (zero_n, one_n) = closed_form_overlaps(lambda, n);
            r += one_n * zero_n / (e - (10700.0 + 400.0 * (n as f64 + 0.5)));
        }
        let got = engine.raman_amplitude(w).unwrap().uncoupled;
        assert!(rel(got, r) <= 1e-8, "{w}: {got} vs {r}");
        let (_, intensity) = engine.intensities(Observable::Raman, w).unwrap();
        assert!((intensity - r.norm_sqr()).abs() <= 1e-8 * r.norm_sqr());
    }
}

/// ⟨χ_bra|G11|χ_ket⟩ by solving the two-channel grid system with the ket
/// as source and integrating against the bra, extrapolated in Δx.
fn grid_matrix_element(j: &JobConfig, omega: f64, bra: usize, ket: usize) -> Complex64 {
    let spec = j.two_channel();
    let e = Complex64::new(omega + 200.0, 450.0);
    let (lo, hi) = grid::suggest_domain(&[spec.channel1, spec.channel2], &[-0.5, 0.7], &[e], 24.0);
    let mut g = GridSpec::anchored(j.coupling.x_c, 1e-3, lo, hi).unwrap();
    let mut values = Vec::new();
    for _ in 0..4 {
        let op = GridOperator::coupled(g, &spec, e).unwrap();
        let mut rhs = vec![Complex64::new(0.0, 0.0); 2 * g.points()];
        for k in 0..g.points() {
            rhs[2 * k] = Complex64::new(chi(ket, 35.4, 400.0, g.coord(k)), 0.0);
        }
        let u = op.solve(&rhs).unwrap();
        let parts = op.split(&u);
        grid::check_boundary(&[&parts[0], &parts[1]]).unwrap();
        let sum: Complex64 = (0..g.points()).map(|k| chi(bra, 35.4, 400.0, g.coord(k)) * parts[0][k]).sum();
        values.push(sum * g.spacing());
        g = g.refined();
    }
    let (v, change) = grid::richardson(&values);
    assert!(change <= 1e-8 * v.norm(), "grid element not converged: {change}");
    v
}

#[test]
fn factorized_amplitudes_match_grid_double_quadrature() {
    let j = job(&[]);
    let engine = SpectrumEngine::new(&j).unwrap();
    for &w in &[10300.0, 10900.0, 11433.0, 12300.0, 13700.0] {
        let a = engine.absorption_amplitude(w).unwrap().coupled;
        let a_grid = grid_matrix_element(&j, w, 0, 0);
        assert!(rel(a, a_grid) <= 1e-6, "absorption {w}: {a} vs {a_grid}");
        let r = engine.raman_amplitude(w).unwrap().coupled;
        let r_grid = grid_matrix_element(&j, w, 1, 0);
        assert!(rel(r, r_grid) <= 1e-6, "raman {w}: {r} vs {r_grid}");
    }
}

#[test]
fn undisplaced_raman_vanishes() {
    let j = job(&["coupling.K0=0", "allowed.displacement=0"]);
    let engine = SpectrumEngine::new(&j).unwrap();
    for &w in &j.spectrum.frequencies() {
        assert_eq!(engine.raman_amplitude(w).unwrap().uncoupled, Complex64::new(0.0, 0.0));
    }
}

#[test]
fn intensities_continuous_in_coupling() {
    let zero = SpectrumEngine::new(&job(&["coupling.K0=0"])).unwrap();
    let tiny = SpectrumEngine::new(&job(&["coupling.K0=1e-8"])).unwrap();
    for obs in [Observable::Absorption, Observable::Raman] {
        let a = zero.sweep(obs).unwrap();
        let b = tiny.sweep(obs).unwrap();
        for (x, y) in b.coupled.iter().zip(&a.coupled) {
            assert!((x - y).abs() <= 1e-10 * y.abs(), "{obs}: {x} vs {y}");
        }
    }
}

#[test]
fn sweeps_are_deterministic() {
    let engine = SpectrumEngine::new(&job(&[])).unwrap();
    for obs in [Observable::Absorption, Observable::Raman] {
        let a = engine.sweep(obs).unwrap();
        let b = SpectrumEngine::new(&job(&[])).unwrap().sweep(obs).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.coupled), bits(&b.coupled));
        assert_eq!(bits(&a.uncoupled), bits(&b.uncoupled));
    }
}

#[test]
fn sweep_reports_failing_frequency() {
    // Far above the window the spectral truncation margin is exhausted; the
    // first failing grid point is reported.
    let j = job(&["spectrum.omega_max=400000", "spectrum.points=3"]);
    let err = SpectrumEngine::new(&j).unwrap().sweep(Observable::Absorption).unwrap_err();
    assert!(err.to_string().contains("omega = 205000"), "{err}");
}

#[test]
fn rayleigh_profile_flagged() {
    let engine = SpectrumEngine::new(&job(&["spectrum.raman_final=0"])).unwrap();
    assert!(engine.is_rayleigh());
    // Rayleigh amplitude is the absorption amplitude.
    let w = 11000.0;
    assert_eq!(engine.raman_amplitude(w).unwrap(), engine.absorption_amplitude(w).unwrap());
}

#[test]
fn coupled_peaks_remain_positive_and_finite() {
    let engine = SpectrumEngine::new(&job(&[])).unwrap();
    let a = engine.sweep(Observable::Absorption).unwrap();
    assert!(a.coupled.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!(!local_maxima(&a.coupled).is_empty());
}
