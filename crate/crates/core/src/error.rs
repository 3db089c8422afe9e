//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its refinement budget before reaching the
    /// requested tolerance. Usually a sign of a non-integrable singularity
    /// that the caller should have split off analytically.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// The excision sequence of a principal-value integral failed the ratio
    /// test, i.e. the kernel/function pair is not PV-integrable.
    #[error("principal value extrapolation diverged: {0}")]
    PvDivergent(String),

    /// The marching cover failed its constructive coverage/overlap check.
    #[error("cover construction failed: {0}")]
    CoverConstruction(String),

    /// A partition of unity could not be certified on its probe grid.
    #[error("partition of unity construction failed: {0}")]
    PartitionConstruction(String),

    /// An atom produced internally failed validation; this is a bug in the
    /// decomposition pipeline, not a data error.
    #[error("internal decomposition error: {0}")]
    DecompositionInternal(String),

    /// A sampled function is too coarse for the requested operation.
    #[error("under-resolved grid: {0}")]
    UnderResolved(String),

    /// Malformed input file or configuration document.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
