//! Error types for every fallible operation in the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure categories. The CLI maps [`Error::is_numerical`] to exit code 2
/// and everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration value, unknown key, unknown preset or override.
    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    /// Configuration file that does not parse.
    #[error("failed to parse configuration: {0}")]
    Parse(String),

    /// Malformed or unsupported witness specification.
    #[error("invalid witness spec `{spec}`: {message}")]
    Spec { spec: String, message: String },

    /// A scale factor that must be nonzero was zero.
    #[error("degenerate scale: {0}")]
    DegenerateScale(String),

    /// A required input entry (for example a moment) was not supplied.
    #[error("incomplete input: missing {0}")]
    IncompleteInput(String),

    /// Fock-space dimension above the configured hard cap.
    #[error("basis dimension {dimension} exceeds the cap {cap}")]
    Resource { dimension: usize, cap: usize },

    /// Coherent amplitude too large for the requested cutoff.
    #[error(
        "cutoff {cutoff} for mode {mode} leaves tail mass {tail:.3e} above tolerance; \
         cutoff {required} is required"
    )]
    CutoffTooSmall {
        mode: char,
        cutoff: usize,
        required: usize,
        tail: f64,
    },

    /// Moment power larger than the mode cutoff.
    #[error("power {power} on mode {mode} exceeds cutoff {cutoff}")]
    Truncation {
        mode: char,
        power: u32,
        cutoff: usize,
    },

    /// Probability on the top Fock level exceeded the monitor threshold.
    #[error("truncation monitor breach at gt = {time}: top-level probability {probability:.3e} > {tolerance:.1e}")]
    TruncationBreach {
        time: f64,
        probability: f64,
        tolerance: f64,
    },

    /// Propagator failed to reach the requested tolerance.
    #[error("time evolution did not converge: {0}")]
    NonConvergence(String),

    /// Filesystem or serialization failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV writer failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_) | Error::TruncationBreach { .. }
        )
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn spec(spec: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            spec: spec.into(),
            message: message.into(),
        }
    }
}
