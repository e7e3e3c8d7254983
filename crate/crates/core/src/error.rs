use std::path::PathBuf;

use crate::metric::SpaceId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point belongs to space {found}, expected {expected}")]
    SpaceMismatch { expected: SpaceId, found: SpaceId },

    #[error("coordinates {coords:?} are not a point of {space}")]
    NotInSpace { space: SpaceId, coords: Vec<f64> },

    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} is not supported on {space}")]
    Unsupported { what: String, space: SpaceId },

    #[error("point left the admissible region of {space}: {coords:?}")]
    BoundaryExcursion { space: SpaceId, coords: Vec<f64> },

    #[error("{solver} did not converge after {iterations} iterations (last step {last_step:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        last_step: f64,
    },

    #[error(
        "mean certificate failed: worst gap {worst_gap:e}, worst distance slack {worst_slack:e}"
    )]
    CertificateFailed { worst_gap: f64, worst_slack: f64 },

    #[error(
        "integration became unstable at t = {time} (distance to singularity grew to {growth:e}x)"
    )]
    StepInstability { time: f64, growth: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid mapping description `{text}`: {reason}")]
    InvalidMapping { text: String, reason: String },

    #[error("invalid field description `{text}`: {reason}")]
    InvalidField { text: String, reason: String },

    #[error("line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
