//! Error taxonomy shared by every module, with the CLI exit-code mapping.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid partition: m = {m} out of {total} points (need 1 <= m < total)")]
    InvalidPartition { m: usize, total: usize },
    #[error("probability {0} outside [0, 1/2]")]
    InvalidProbability(f64),
    #[error("margin gamma must be positive, got {0}")]
    InvalidMargin(f64),
    #[error("confidence delta must lie in (0, 1), got {0}")]
    InvalidConfidence(f64),
    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("linear system is singular to working precision")]
    SingularSystem,
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),
    #[error("feature row {0} has zero norm")]
    DegenerateFeatures(usize),
    #[error("vertex {0} is isolated (zero degree); raising k adds neighbors")]
    IsolatedVertex(usize),
    #[error("graph has {0} connected components where one is required")]
    Disconnected(usize),
    #[error("instance too large for exact enumeration: {size} points exceeds the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("posterior puts mass outside the prior support (divergent KL)")]
    UnboundedPosterior,
    #[error("invalid label at line {line}: {value:?}")]
    InvalidLabel { line: usize, value: String },
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the CLI: 2 for invalid configuration or
    /// parameters, 3 for data problems, 4 for numerical failures.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::InvalidPartition { .. }
            | Error::InvalidProbability(_)
            | Error::InvalidMargin(_)
            | Error::InvalidConfidence(_)
            | Error::MissingParameter(_)
            | Error::TooLarge { .. }
            | Error::Config(_) => 2,
            Error::DimensionMismatch(_)
            | Error::InvalidDistribution(_)
            | Error::InvalidLabel { .. }
            | Error::ParseError { .. }
            | Error::NonFinite(_)
            | Error::Io { .. } => 3,
            Error::NotSymmetric
            | Error::SingularSystem
            | Error::NoConvergence(_)
            | Error::NotPsd(_)
            | Error::DegenerateFeatures(_)
            | Error::IsolatedVertex(_)
            | Error::Disconnected(_)
            | Error::UnboundedPosterior => 4,
        }
    }
}
