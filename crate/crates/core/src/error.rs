use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-range configuration. `field` is a dotted path such
    /// as `coupling.K0` (or `line 12` for syntax errors).
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("argument {arg} outside the working domain: {message}")]
    OutOfDomain { arg: String, message: String },

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("denominator |D| = {magnitude:.3e} too small at energy {energy} (near resonance pole)")]
    NearPole { energy: Complex64, magnitude: f64 },

    #[error("grid domain too small: boundary/peak kernel ratio {ratio:.3e} exceeds {threshold:.1e}")]
    DomainTooSmall { ratio: f64, threshold: f64 },

    #[error("sweep failed at omega = {omega} cm^-1: {source}")]
    Sweep { omega: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    pub(crate) fn domain(arg: impl Into<String>, message: impl Into<String>) -> Self {
        Error::OutOfDomain { arg: arg.into(), message: message.into() }
    }

    /// True for configuration problems, false for numerical ones.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } => true,
            Error::Sweep { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
