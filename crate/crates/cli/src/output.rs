use std::fmt::Write as _;

use crosspec_core::config::JobConfig;
use crosspec_core::spectra::SpectrumResult;
use serde_json::json;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, enough to round-trip any f64.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv(config: &JobConfig, result: &SpectrumResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# crosspec v{VERSION} config={}", result.fingerprint);
    let _ = writeln!(
        s,
        "# observable={} normalization={} scale={}",
        result.observable,
        result.mode,
        num(result.normalization)
    );
    for line in config.render().lines() {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str("omega_cm1,I_coupled,I_uncoupled\n");
    for ((w, c), u) in result.omega.iter().zip(&result.coupled).zip(&result.uncoupled) {
        let _ = writeln!(s, "{},{},{}", num(*w), num(*c), num(*u));
    }
    s
}

pub fn json(config: &JobConfig, result: &SpectrumResult) -> String {
    let doc = json!({
        "crosspec": VERSION,
        "config_fingerprint": result.fingerprint,
        "config": config.render(),
        "observable": result.observable.to_string(),
        "normalization": { "mode": result.mode.to_string(), "scale": result.normalization },
        "omega_cm1": result.omega,
        "I_coupled": result.coupled,
        "I_uncoupled": result.uncoupled,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values are finite");
    s.push('\n');
    s
}
