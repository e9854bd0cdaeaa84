//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use crosspec_core::config::{parse_job_with_overrides, JobConfig};
use crosspec_core::greens::{ChannelResolvent, CoupledGreens};
use crosspec_core::grid::{self, OracleSettings};
use crosspec_core::spectra::{local_maxima, relative_l2, Observable, SpectrumEngine};
use crosspec_core::specfun::{airy_ai, airy_ai_pair, airy_bi_pair};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUDGET: Duration = Duration::from_secs(60);

fn job_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../jobs/fig23.job")
}

fn fig23(overrides: &[&str]) -> JobConfig {
    let text = std::fs::read_to_string(job_path()).expect("bundled job");
    parse_job_with_overrides(&text, overrides).expect("bundled job parses")
}

fn energy(job: &JobConfig, omega: f64) -> Complex64 {
    Complex64::new(omega + 0.5 * job.ground.omega, job.spectrum.damping)
}

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let job = fig23(&[]);
    let spec = job.two_channel();
    let greens = CoupledGreens::new(&spec).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = 1e-3;
    let (mut worst, mut worst_change): (f64, f64) = (0.0, 0.0);
    let points = 10;
    for _ in 0..points {
        let omega = rng.gen_range(job.spectrum.omega_min..job.spectrum.omega_max);
        let e = energy(&job, omega);
        let x = spec.coupling.position + h * rng.gen_range(-125i32..=275) as f64;
        let x0 = spec.coupling.position + h * rng.gen_range(-125i32..=275) as f64;
        let (x_min, x_max) = grid::suggest_domain(&[spec.channel1, spec.channel2], &[x, x0], &[e], 24.0);
        let settings = OracleSettings { x_min, x_max, spacing: h, levels: 4 };
        let oracle = grid::refined_coupled_kernel(&settings, &spec, e, x, x0).map_err(|e| e.to_string())?;
        let exact = greens.kernel(x, x0, e).map_err(|e| e.to_string())?;
        worst_change = worst_change.max(oracle.change);
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((oracle.value[i][j] - exact[i][j]).norm() / exact[i][j].norm());
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-6 && worst_change <= 1e-8 && elapsed <= BUDGET,
        format!(
            "{points} random points, max relative error {worst:.2e} (<= 1e-6), grid self-convergence {worst_change:.1e} (<= 1e-8), {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

/// ⟨0|n⟩ and ⟨1|n⟩ for displaced equal-frequency oscillators.
fn overlaps(lambda: f64, n: usize) -> (f64, f64) {
    let log_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let zero_n = sign * (-0.5 * lambda * lambda + n as f64 * lambda.ln() - 0.5 * log_fact).exp();
    (zero_n, zero_n * (n as f64 - lambda * lambda) / (-lambda))
}

fn uncoupled_limits() -> Outcome {
    let job = fig23(&["coupling.K0=0"]);
    let engine = SpectrumEngine::new(&job).map_err(|e| e.to_string())?;
    // S = mωd²/(2ħ) from CGS constants
    let (hbar, c, amu) = (1.054571817e-27, 2.99792458e10, 1.66053906660e-24);
    let omega_rad = 2.0 * PI * c * job.allowed.omega;
    let d = job.allowed.displacement * 1e-8;
    let s = job.ground.mass * amu * omega_rad * d * d / (2.0 * hbar);
    let lambda = s.sqrt();
    let level = |n: usize| job.allowed.origin + job.allowed.omega * (n as f64 + 0.5);
    let (mut abs_err, mut raman_err): (f64, f64) = (0.0, 0.0);
    for w in job.spectrum.frequencies() {
        let e = energy(&job, w);
        let mut lorentz = 0.0;
        let mut sos = Complex64::new(0.0, 0.0);
        let mut log_weight = -s;
        for n in 0..=120 {
            if n > 0 {
                log_weight += s.ln() - (n as f64).ln();
            }
            lorentz += -(log_weight.exp() / (e - level(n))).im;
            if n <= 80 {
                let (zero_n, one_n) = overlaps(lambda, n);
                sos += one_n * zero_n / (e - level(n));
            }
        }
        let (_, ia) = engine.intensities(Observable::Absorption, w).map_err(|e| e.to_string())?;
        let (_, ir) = engine.intensities(Observable::Raman, w).map_err(|e| e.to_string())?;
        abs_err = abs_err.max((ia - lorentz).abs() / lorentz);
        raman_err = raman_err.max((ir - sos.norm_sqr()).abs() / sos.norm_sqr());
    }
    verdict(
        abs_err <= 1e-8 && raman_err <= 1e-8,
        format!("S = {s:.5}; absorption vs Lorentzian sum {abs_err:.2e}, Raman vs sum over states {raman_err:.2e} (<= 1e-8)"),
    )
}

fn vibronic_progression() -> Outcome {
    let job = fig23(&["coupling.K0=0"]);
    let result = SpectrumEngine::new(&job)
        .and_then(|e| e.sweep(Observable::Absorption))
        .map_err(|e| e.to_string())?;
    let step = result.omega[1] - result.omega[0];
    let peaks: Vec<f64> = local_maxima(&result.uncoupled).iter().map(|&k| result.omega[k]).collect();
    let spacings: Vec<f64> = peaks.windows(2).map(|p| p[1] - p[0]).collect();
    let ok = !spacings.is_empty() && spacings.iter().all(|s| (s - job.allowed.omega).abs() <= step);
    let peaks_text = peaks.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(", ");
    verdict(
        ok,
        format!(
            "{} local maxima [{peaks_text}] cm-1, spacings {spacings:?} (need {} +/- {step})",
            peaks.len(),
            job.allowed.omega
        ),
    )
}

fn raman_more_affected() -> Outcome {
    let job = fig23(&[]);
    let engine = SpectrumEngine::new(&job).map_err(|e| e.to_string())?;
    let a = engine.sweep(Observable::Absorption).map_err(|e| e.to_string())?;
    let r = engine.sweep(Observable::Raman).map_err(|e| e.to_string())?;
    let da = relative_l2(&a.coupled, &a.uncoupled);
    let dr = relative_l2(&r.coupled, &r.uncoupled);
    verdict(dr > da, format!("relative L2 deviation: Raman {dr:.4}, absorption {da:.4}"))
}

fn invariant_suites() -> Outcome {
    let job = fig23(&[]);
    let spec = job.two_channel();
    let greens = CoupledGreens::new(&spec).map_err(|e| e.to_string())?;
    let c = spec.coupling.position;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let (mut asym, mut max_im): (f64, f64) = (0.0, f64::NEG_INFINITY);
    for _ in 0..200 {
        let x = rng.gen_range(-0.2..0.4);
        let x0 = rng.gen_range(-0.2..0.4);
        let e = energy(&job, rng.gen_range(job.spectrum.omega_min..job.spectrum.omega_max));
        let a = greens.kernel(x, x0, e).map_err(|e| e.to_string())?;
        let b = greens.kernel(x0, x, e).map_err(|e| e.to_string())?;
        let diag = greens.kernel(x, x, e).map_err(|e| e.to_string())?;
        max_im = max_im.max(diag[0][0].im).max(diag[1][1].im);
        for i in 0..2 {
            for j in 0..2 {
                asym = asym.max((a[i][j] - b[j][i]).norm() / a[i][j].norm());
            }
        }
    }
    if asym > 1e-12 {
        failures.push(format!("symmetry {asym:.1e}"));
    }
    if max_im >= 0.0 {
        failures.push(format!("Im G_ii reached {max_im:e}"));
    }

    let zero = SpectrumEngine::new(&fig23(&["coupling.K0=0", "spectrum.points=401"])).map_err(|e| e.to_string())?;
    let tiny = SpectrumEngine::new(&fig23(&["coupling.K0=1e-8", "spectrum.points=401"])).map_err(|e| e.to_string())?;
    let mut cont: f64 = 0.0;
    for obs in [Observable::Absorption, Observable::Raman] {
        let a = zero.sweep(obs).map_err(|e| e.to_string())?;
        let b = tiny.sweep(obs).map_err(|e| e.to_string())?;
        for (x, y) in b.coupled.iter().zip(&a.coupled) {
            cont = cont.max((x - y).abs() / y.abs());
        }
    }
    if cont > 1e-10 {
        failures.push(format!("K0 continuity {cont:.1e}"));
    }

    let e = energy(&job, 11100.0);
    let (x, x0) = (0.06, 0.13);
    let two_hop = |k0: f64| -> Result<Complex64, String> {
        let mut s = spec;
        s.coupling.strength = k0;
        let g = CoupledGreens::new(&s).map_err(|e| e.to_string())?;
        let f = |i: usize, a: f64, b: f64| g.g0(i, a, b, e).map_err(|e| e.to_string());
        let full = g.element(0, 0, x, x0, e).map_err(|e| e.to_string())?;
        Ok(full - f(0, x, x0)? - k0 * k0 * f(0, x, c)? * f(1, c, c)? * f(0, c, x0)?)
    };
    let hop_ratio = (two_hop(1.0)? / two_hop(0.5)?).norm();
    if (hop_ratio / 16.0 - 1.0).abs() > 1e-3 {
        failures.push(format!("hop scaling {hop_ratio}"));
    }

    let linear = ChannelResolvent::new(&spec.channel2).map_err(|e| e.to_string())?;
    let mu = spec.channel2.effective_mass();
    let col = |x: f64| linear.value(x, c, e).map_err(|e| e.to_string());
    let d = 1e-4;
    let mut residual: f64 = 0.0;
    for offset in [-0.3, -0.05, 0.04, 0.2] {
        let x = c + offset;
        let second = (-col(x - 2.0 * d)? + 16.0 * col(x - d)? - 30.0 * col(x)? + 16.0 * col(x + d)? - col(x + 2.0 * d)?) / (12.0 * d * d);
        let kinetic = second / (2.0 * mu);
        let pot = (e - spec.channel2.value(x)) * col(x)?;
        residual = residual.max((kinetic + pot).norm() / (kinetic.norm() + pot.norm()));
    }
    let right = (-25.0 * col(c)? + 48.0 * col(c + d)? - 36.0 * col(c + 2.0 * d)? + 16.0 * col(c + 3.0 * d)? - 3.0 * col(c + 4.0 * d)?) / (12.0 * d);
    let left = (25.0 * col(c)? - 48.0 * col(c - d)? + 36.0 * col(c - 2.0 * d)? - 16.0 * col(c - 3.0 * d)? + 3.0 * col(c - 4.0 * d)?) / (12.0 * d);
    residual = residual.max(((right - left) / (2.0 * mu) - 1.0).norm());
    if residual > 1e-6 {
        failures.push(format!("delta-column residual {residual:.1e}"));
    }

    let rot = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let (mut wronskian, mut identity): (f64, f64) = (0.0, 0.0);
    for _ in 0..400 {
        let z = Complex64::from_polar(rng.gen_range(0.0..50.0), rng.gen_range(-PI..PI));
        let (ai, aip) = airy_ai_pair(z).map_err(|e| e.to_string())?;
        let (bi, bip) = airy_bi_pair(z).map_err(|e| e.to_string())?;
        // relative to the size of the individual products
        let scale = (ai * bip).norm().max((aip * bi).norm()).max(1.0 / PI);
        wronskian = wronskian.max((ai * bip - aip * bi - 1.0 / PI).norm() / scale);
        let sum = ai + rot * airy_ai(rot * z).map_err(|e| e.to_string())? + rot * rot * airy_ai(rot * rot * z).map_err(|e| e.to_string())?;
        let scale = ai.norm().max(airy_ai(rot * z).unwrap().norm()).max(airy_ai(rot * rot * z).unwrap().norm());
        identity = identity.max(sum.norm() / scale);
    }
    if wronskian > 1e-9 || identity > 1e-9 {
        failures.push(format!("Airy Wronskian {wronskian:.1e}, rotation identity {identity:.1e}"));
    }

    let summary = format!(
        "asymmetry {asym:.1e}, max Im G_ii {max_im:.2e}, K0 continuity {cont:.1e}, hop ratio {hop_ratio:.5}, delta residual {residual:.1e}, Airy {wronskian:.1e}/{identity:.1e}"
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; failing: {}", failures.join(", ")))
    }
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("crosspec-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    let mut slowest = Duration::ZERO;
    for k in 0..2 {
        let out = dir.join(format!("run{k}.csv"));
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_crosspec"))
            .arg("run")
            .arg(job_path())
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        if !status.success() {
            return Err(format!("crosspec run exited with {status}"));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let rows = outputs[0].split(|&b| b == b'\n').filter(|l| l.first().is_some_and(|b| b.is_ascii_digit())).count();
    verdict(
        outputs[0] == outputs[1] && rows >= 2000 && slowest <= BUDGET,
        format!(
            "identical bytes: {}, {rows}-point dual sweep in {:.2} s",
            outputs[0] == outputs[1],
            slowest.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("oracle equivalence (coupled kernel vs two-channel grid)", oracle_equivalence),
        ("uncoupled spectral limits", uncoupled_limits),
        ("vibronic progression spacing", vibronic_progression),
        ("Raman profile more affected by coupling than absorption", raman_more_affected),
        ("invariant suites", invariant_suites),
        ("determinism and sweep runtime", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
