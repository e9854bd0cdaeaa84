//! Job files: a flat, sectioned `key = value [unit]` format.
//!
//! ```text
//! [ground]
//! mass = 35.4 amu
//! omega = 400 cm-1
//! ```
//!
//! Values are converted to internal units (cm⁻¹, Å, amu) on parse. The
//! canonical rendering writes every field explicitly in internal units; it
//! parses back to an identical configuration and is what the fingerprint
//! hashes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::OracleSettings;
use crate::potential::{CouplingSpec, PotentialSpec, TwoChannelSpec};
use crate::units::{self, EnergyUnit};

pub const DEFAULT_ORIGIN: f64 = 10700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    Absorption,
    Raman,
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absorption" => Ok(Observable::Absorption),
            "raman" => Ok(Observable::Raman),
            other => Err(Error::config("spectrum.mode", format!("expected absorption or raman, got `{other}`"))),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::Absorption => "absorption",
            Observable::Raman => "raman",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Both observables scaled by the uncoupled absorption peak (Raman by its square).
    PeakUncoupledAbsorption,
    /// Each observable scaled by its own uncoupled peak.
    PeakUncoupled,
    None,
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peak-uncoupled-absorption" => Ok(Normalization::PeakUncoupledAbsorption),
            "peak-uncoupled" => Ok(Normalization::PeakUncoupled),
            "none" => Ok(Normalization::None),
            other => Err(Error::config(
                "spectrum.normalization",
                format!("expected peak-uncoupled-absorption, peak-uncoupled or none, got `{other}`"),
            )),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::PeakUncoupledAbsorption => "peak-uncoupled-absorption",
            Normalization::PeakUncoupled => "peak-uncoupled",
            Normalization::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundConfig {
    pub mass: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllowedConfig {
    pub omega: f64,
    pub displacement: f64,
    pub origin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForbiddenConfig {
    pub slope: f64,
    pub crossing_energy: f64,
    pub anchor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub k0: f64,
    pub x_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub damping: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub mode: Observable,
    pub initial: usize,
    pub raman_final: usize,
    pub normalization: Normalization,
}

impl SpectrumConfig {
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.points;
        let step = (self.omega_max - self.omega_min) / (n - 1) as f64;
        (0..n)
            .map(|k| if k + 1 == n { self.omega_max } else { self.omega_min + k as f64 * step })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub ground: GroundConfig,
    pub allowed: AllowedConfig,
    pub forbidden: ForbiddenConfig,
    pub coupling: CouplingConfig,
    pub spectrum: SpectrumConfig,
    pub oracle: Option<OracleSettings>,
}

impl JobConfig {
    /// The two excited diabats and their coupling. Every curve shares the
    /// ground-state mass.
    pub fn two_channel(&self) -> TwoChannelSpec {
        let mass = self.ground.mass;
        TwoChannelSpec {
            channel1: PotentialSpec::Harmonic {
                mass,
                frequency: self.allowed.omega,
                center: self.allowed.displacement,
                min_energy: self.allowed.origin,
            },
            channel2: PotentialSpec::Linear {
                mass,
                slope: self.forbidden.slope,
                anchor: self.forbidden.anchor,
                anchor_energy: self.forbidden.crossing_energy,
            },
            coupling: CouplingSpec { strength: self.coupling.k0, position: self.coupling.x_c },
        }
    }

    pub fn ground_potential(&self) -> PotentialSpec {
        PotentialSpec::Harmonic { mass: self.ground.mass, frequency: self.ground.omega, center: 0.0, min_energy: 0.0 }
    }

    /// Canonical text form: all fields, internal units, fixed order.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let g = &self.ground;
        let a = &self.allowed;
        let f = &self.forbidden;
        let c = &self.coupling;
        let p = &self.spectrum;
        let _ = writeln!(s, "[ground]\nmass = {} amu\nomega = {} cm-1", g.mass, g.omega);
        let _ = writeln!(s, "[allowed]\nomega = {} cm-1\ndisplacement = {} A\norigin = {} cm-1", a.omega, a.displacement, a.origin);
        let _ = writeln!(
            s,
            "[forbidden]\nslope = {} cm-1/A\ncrossing_energy = {} cm-1\nanchor = {} A",
            f.slope, f.crossing_energy, f.anchor
        );
        let _ = writeln!(s, "[coupling]\nK0 = {} cm-1*A\nx_c = {} A", c.k0, c.x_c);
        let _ = writeln!(
            s,
            "[spectrum]\ndamping = {} cm-1\nomega_min = {} cm-1\nomega_max = {} cm-1\npoints = {}\nmode = {}\ninitial = {}\nraman_final = {}\nnormalization = {}",
            p.damping, p.omega_min, p.omega_max, p.points, p.mode, p.initial, p.raman_final, p.normalization
        );
        if let Some(o) = &self.oracle {
            let _ = writeln!(
                s,
                "[oracle]\nx_min = {} A\nx_max = {} A\nspacing = {} A\nlevels = {}",
                o.x_min, o.x_max, o.spacing, o.levels
            );
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of [`JobConfig::render`].
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.render().as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    unit: Option<String>,
    line: usize,
}

/// Raw parsed document: section → key → entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("ground", &["mass", "omega"]),
    ("allowed", &["omega", "displacement", "origin"]),
    ("forbidden", &["slope", "crossing_energy", "anchor"]),
    ("coupling", &["K0", "x_c"]),
    (
        "spectrum",
        &["damping", "omega_min", "omega_max", "points", "mode", "initial", "raman_final", "normalization"],
    ),
    ("oracle", &["x_min", "x_max", "spacing", "levels"]),
];

fn check_known(section: &str, key: &str, path: &str) -> Result<()> {
    let Some((_, keys)) = KNOWN.iter().find(|(s, _)| *s == section) else {
        return Err(Error::config(path, format!("unknown section `{section}`")));
    };
    if !keys.contains(&key) {
        return Err(Error::config(path, format!("unknown key `{key}` in [{section}]")));
    }
    Ok(())
}

fn split_value(raw: &str) -> (String, Option<String>) {
    let raw = raw.trim();
    match raw.split_once(char::is_whitespace) {
        Some((v, u)) => (v.to_string(), Some(u.trim().to_string())),
        None => (raw.to_string(), None),
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(format!("line {line_no}"), format!("malformed section header `{line}`")))?
                    .trim();
                if !KNOWN.iter().any(|(s, _)| *s == name) {
                    return Err(Error::config(format!("line {line_no}"), format!("unknown section `[{name}]`")));
                }
                if doc.sections.contains_key(name) {
                    return Err(Error::config(name, format!("section repeated on line {line_no}")));
                }
                doc.sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!("line {line_no}"), format!("expected `key = value`, got `{line}`")));
            };
            let key = key.trim();
            let Some(section) = current.as_deref() else {
                return Err(Error::config(format!("line {line_no}"), format!("`{key}` appears before any section header")));
            };
            let path = format!("{section}.{key}");
            check_known(section, key, &path)?;
            if value.trim().is_empty() {
                return Err(Error::config(path, format!("empty value on line {line_no}")));
            }
            let (value, unit) = split_value(value);
            let entries = doc.sections.get_mut(section).expect("section inserted above");
            if entries.contains_key(key) {
                return Err(Error::config(path, format!("key repeated on line {line_no}")));
            }
            entries.insert(key.to_string(), Entry { value, unit, line: line_no });
        }
        Ok(doc)
    }

    /// Applies `section.key=value [unit]`, replacing or adding the entry.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let Some((path, value)) = assignment.split_once('=') else {
            return Err(Error::config(assignment, "override must look like section.key=value"));
        };
        let path = path.trim();
        let Some((section, key)) = path.split_once('.') else {
            return Err(Error::config(path, "override path must be section.key"));
        };
        check_known(section, key, path)?;
        if value.trim().is_empty() {
            return Err(Error::config(path, "override has an empty value"));
        }
        let (value, unit) = split_value(value);
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), Entry { value, unit, line: 0 });
        Ok(())
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    pub fn resolve(&self) -> Result<JobConfig> {
        let r = Resolver { doc: self };
        let ground = GroundConfig {
            mass: r.quantity("ground", "mass", Kind::Mass)?,
            omega: r.quantity("ground", "omega", Kind::Energy)?,
        };
        let allowed = AllowedConfig {
            omega: r.quantity("allowed", "omega", Kind::Energy)?,
            displacement: r.quantity("allowed", "displacement", Kind::Length)?,
            origin: r.optional("allowed", "origin", Kind::Energy)?.unwrap_or(DEFAULT_ORIGIN),
        };
        let coupling = CouplingConfig {
            k0: r.quantity("coupling", "K0", Kind::EnergyLength)?,
            x_c: r.quantity("coupling", "x_c", Kind::Length)?,
        };
        let forbidden = ForbiddenConfig {
            slope: r.quantity("forbidden", "slope", Kind::EnergyPerLength)?,
            crossing_energy: r.quantity("forbidden", "crossing_energy", Kind::Energy)?,
            anchor: r.optional("forbidden", "anchor", Kind::Length)?.unwrap_or(coupling.x_c),
        };
        let spectrum = SpectrumConfig {
            damping: r.quantity("spectrum", "damping", Kind::Energy)?,
            omega_min: r.quantity("spectrum", "omega_min", Kind::Energy)?,
            omega_max: r.quantity("spectrum", "omega_max", Kind::Energy)?,
            points: r.integer("spectrum", "points")?.ok_or_else(|| missing("spectrum.points"))?,
            mode: r.word("spectrum", "mode")?.unwrap_or(Observable::Absorption),
            initial: r.integer("spectrum", "initial")?.unwrap_or(0),
            raman_final: r.integer("spectrum", "raman_final")?.unwrap_or(1),
            normalization: r.word("spectrum", "normalization")?.unwrap_or(Normalization::PeakUncoupledAbsorption),
        };
        let oracle = if self.sections.contains_key("oracle") {
            Some(OracleSettings {
                x_min: r.quantity("oracle", "x_min", Kind::Length)?,
                x_max: r.quantity("oracle", "x_max", Kind::Length)?,
                spacing: r.quantity("oracle", "spacing", Kind::Length)?,
                levels: r.integer("oracle", "levels")?.unwrap_or(4),
            })
        } else {
            None
        };
        let job = JobConfig { ground, allowed, forbidden, coupling, spectrum, oracle };
        validate(&job)?;
        Ok(job)
    }
}

fn missing(path: &str) -> Error {
    Error::config(path, "missing mandatory field")
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Mass,
    Length,
    Energy,
    EnergyLength,
    EnergyPerLength,
}

fn length_factor(unit: &str) -> Option<f64> {
    match unit {
        "A" | "angstrom" | "Å" => Some(1.0),
        "nm" => Some(10.0),
        "bohr" => Some(0.529177210903),
        _ => None,
    }
}

fn convert(kind: Kind, value: f64, unit: Option<&str>) -> std::result::Result<f64, String> {
    let energy = |u: &str| -> std::result::Result<f64, String> {
        let e: EnergyUnit = u.parse().map_err(|_| format!("unknown energy unit `{u}`"))?;
        Ok(units::convert_energy(1.0, e, EnergyUnit::Wavenumber))
    };
    let Some(unit) = unit else { return Ok(value) };
    let factor = match kind {
        Kind::Mass => match unit {
            "amu" | "u" | "Da" => 1.0,
            _ => return Err(format!("unknown mass unit `{unit}` (expected amu)")),
        },
        Kind::Length => length_factor(unit).ok_or_else(|| format!("unknown length unit `{unit}`"))?,
        Kind::Energy => energy(unit)?,
        Kind::EnergyLength => {
            let (e, l) = unit.split_once('*').ok_or_else(|| format!("expected energy*length unit, got `{unit}`"))?;
            energy(e)? * length_factor(l).ok_or_else(|| format!("unknown length unit `{l}`"))?
        }
        Kind::EnergyPerLength => {
            let (e, l) = unit.split_once('/').ok_or_else(|| format!("expected energy/length unit, got `{unit}`"))?;
            energy(e)? / length_factor(l).ok_or_else(|| format!("unknown length unit `{l}`"))?
        }
    };
    Ok(value * factor)
}

struct Resolver<'a> {
    doc: &'a Document,
}

impl Resolver<'_> {
    fn optional(&self, section: &str, key: &str, kind: Kind) -> Result<Option<f64>> {
        let path = format!("{section}.{key}");
        let Some(e) = self.doc.entry(section, key) else { return Ok(None) };
        let v: f64 = e.value.parse().map_err(|_| Error::config(&path, format!("`{}` is not a number", e.value)))?;
        if !v.is_finite() {
            return Err(Error::config(&path, "value must be finite"));
        }
        convert(kind, v, e.unit.as_deref()).map(Some).map_err(|m| Error::config(&path, m))
    }

    fn quantity(&self, section: &str, key: &str, kind: Kind) -> Result<f64> {
        self.optional(section, key, kind)?.ok_or_else(|| missing(&format!("{section}.{key}")))
    }

    fn integer(&self, section: &str, key: &str) -> Result<Option<usize>> {
        let path = format!("{section}.{key}");
        let Some(e) = self.doc.entry(section, key) else { return Ok(None) };
        if let Some(u) = &e.unit {
            return Err(Error::config(&path, format!("integer field takes no unit, got `{u}`")));
        }
        e.value
            .parse()
            .map(Some)
            .map_err(|_| Error::config(&path, format!("`{}` is not a non-negative integer", e.value)))
    }

    fn word<T: FromStr<Err = Error>>(&self, section: &str, key: &str) -> Result<Option<T>> {
        let Some(e) = self.doc.entry(section, key) else { return Ok(None) };
        e.value.parse().map(Some)
    }
}

fn validate(job: &JobConfig) -> Result<()> {
    let positive = |path: &str, v: f64| {
        if v > 0.0 {
            Ok(())
        } else {
            Err(Error::config(path, format!("must be > 0, got {v}")))
        }
    };
    positive("ground.mass", job.ground.mass)?;
    positive("ground.omega", job.ground.omega)?;
    positive("allowed.omega", job.allowed.omega)?;
    positive("spectrum.damping", job.spectrum.damping)?;
    if job.forbidden.slope == 0.0 {
        return Err(Error::config("forbidden.slope", "must be nonzero"));
    }
    if job.coupling.k0 < 0.0 {
        return Err(Error::config("coupling.K0", format!("must be >= 0, got {}", job.coupling.k0)));
    }
    if job.spectrum.points < 2 {
        return Err(Error::config("spectrum.points", format!("need at least 2 points, got {}", job.spectrum.points)));
    }
    if !(job.spectrum.omega_min < job.spectrum.omega_max) {
        return Err(Error::config(
            "spectrum.omega_max",
            format!("must exceed omega_min ({} >= {})", job.spectrum.omega_min, job.spectrum.omega_max),
        ));
    }
    if let Some(o) = &job.oracle {
        if !(o.x_min < o.x_max) {
            return Err(Error::config("oracle.x_max", "must exceed oracle.x_min"));
        }
        positive("oracle.spacing", o.spacing)?;
        if o.levels == 0 {
            return Err(Error::config("oracle.levels", "need at least one level"));
        }
    }
    Ok(())
}

/// Parses and validates a job document.
pub fn parse_job(text: &str) -> Result<JobConfig> {
    Document::parse(text)?.resolve()
}

/// Parses a job, then applies `section.key=value` overrides in order.
pub fn parse_job_with_overrides<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<JobConfig> {
    let mut doc = Document::parse(text)?;
    for o in overrides {
        doc.apply_override(o.as_ref())?;
    }
    doc.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    const JOB: &str = "\
# test job
[ground]
mass = 35.4 amu
omega = 400 cm-1
[allowed]
omega = 400
displacement = 0.1 A
[forbidden]
slope = -25000 cm-1/A
crossing_energy = 10804.1 cm-1
[coupling]
K0 = 5.54275e-15 erg*A
x_c = 0.02477 A
[spectrum]
damping = 450 cm-1
omega_min = 10000
omega_max = 14000
points = 11
";

    #[test]
    fn parses_with_defaults() {
        let job = parse_job(JOB).unwrap();
        assert_eq!(job.allowed.origin, DEFAULT_ORIGIN);
        assert_eq!(job.forbidden.anchor, 0.02477);
        assert!((job.coupling.k0 - 27.90285).abs() < 1e-4);
        assert_eq!(job.spectrum.raman_final, 1);
        assert_eq!(job.spectrum.normalization, Normalization::PeakUncoupledAbsorption);
        assert_eq!(job.spectrum.frequencies().len(), 11);
        assert_eq!(job.spectrum.frequencies()[10], 14000.0);
    }

    #[test]
    fn render_round_trips() {
        let job = parse_job(JOB).unwrap();
        let again = parse_job(&job.render()).unwrap();
        assert_eq!(job, again);
        assert_eq!(job.fingerprint(), again.fingerprint());
        assert_eq!(job.fingerprint().len(), 16);
    }

    #[test]
    fn zero_coupling_accepted_zero_damping_rejected() {
        let job = parse_job_with_overrides(JOB, &["coupling.K0=0"]).unwrap();
        assert_eq!(job.coupling.k0, 0.0);
        let err = parse_job_with_overrides(JOB, &["spectrum.damping=0"]).unwrap_err();
        assert!(err.to_string().contains("spectrum.damping"), "{err}");
    }

    #[test]
    fn diagnostics_name_fields() {
        let cases = [
            (JOB.replace("slope = -25000 cm-1/A\n", ""), "forbidden.slope"),
            (JOB.replace("35.4 amu", "35.4 kg"), "ground.mass"),
            (JOB.replace("points = 11", "points = 1"), "spectrum.points"),
            (JOB.replace("omega_min = 10000", "omega_min = 15000"), "spectrum.omega_max"),
            (JOB.replace("[coupling]", "[couplings]"), "line 11"),
            (JOB.replace("x_c = 0.02477 A", "x_c 0.02477"), "line 13"),
            (JOB.replace("damping = 450 cm-1", "damping = fast"), "spectrum.damping"),
            (format!("{JOB}colour = red\n"), "spectrum.colour"),
        ];
        for (text, field) in cases {
            let err = parse_job(&text).unwrap_err();
            assert!(err.is_config());
            assert!(err.to_string().contains(field), "{field}: {err}");
        }
    }

    #[test]
    fn override_paths_validated() {
        assert!(parse_job_with_overrides(JOB, &["coupling.k0=1"]).is_err());
        assert!(parse_job_with_overrides(JOB, &["K0=1"]).is_err());
        let job = parse_job_with_overrides(JOB, &["forbidden.slope=-2 eV/A"]).unwrap();
        assert!((job.forbidden.slope + 2.0 * 8065.54).abs() < 0.1);
    }
}
