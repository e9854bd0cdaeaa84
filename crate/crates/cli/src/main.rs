use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crosspec_core::config::{parse_job_with_overrides, JobConfig, Observable};
use crosspec_core::spectra::SpectrumEngine;

#[allow(clippy::needless_range_loop)]
mod checks;
mod output;

#[derive(Parser, Debug)]
#[command(name = "crosspec", version, about = "Absorption and resonance Raman spectra of a delta-coupled curve crossing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute coupled and uncoupled spectra for a job file.
    Run {
        job: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Override a job field, e.g. `coupling.K0=0` (repeatable).
        #[arg(long = "set", value_name = "PATH=VALUE")]
        overrides: Vec<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run quick consistency checks on a job.
    Validate {
        job: PathBuf,
        #[arg(long = "set", value_name = "PATH=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Absorption,
    Raman,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<crosspec_core::Error> for Failure {
    fn from(e: crosspec_core::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn load(path: &PathBuf, overrides: &[String]) -> Result<JobConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read job file {}: {e}", path.display())))?;
    Ok(parse_job_with_overrides(&text, overrides)?)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CROSSPEC_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("CROSSPEC_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("cannot size thread pool: {e}")))
}

fn run(job: PathBuf, mode: Option<Mode>, overrides: Vec<String>, out: Option<PathBuf>, format: Format) -> Result<(), Failure> {
    let mut config = load(&job, &overrides)?;
    if let Some(m) = mode {
        config.spectrum.mode = match m {
            Mode::Absorption => Observable::Absorption,
            Mode::Raman => Observable::Raman,
        };
    }
    configure_threads()?;
    let engine = SpectrumEngine::new(&config)?;
    let result = engine.sweep(config.spectrum.mode)?;
    let text = match format {
        Format::Csv => output::csv(&config, &result),
        Format::Json => output::json(&config, &result),
    };
    match out {
        Some(path) => fs::write(&path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            match std::io::stdout().write_all(text.as_bytes()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(|e| Failure::Io(format!("cannot write output: {e}"))),
            }
        }
    }
}

fn validate(job: PathBuf, overrides: Vec<String>) -> Result<(), Failure> {
    let config = load(&job, &overrides)?;
    let report = checks::run_all(&config);
    for line in &report.lines {
        println!("{line}");
    }
    if report.failed > 0 {
        return Err(Failure::Numerical(format!("{} of {} checks failed", report.failed, report.total)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { job, mode, overrides, out, format } => run(job, mode, overrides, out, format),
        Command::Validate { job, overrides } => validate(job, overrides),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("crosspec: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
