use std::path::PathBuf;

use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unreachable sector: two_sz = {two_sz} for {site_count} sites of local dimension {local_dim} ({reason})")]
    UnreachableSector {
        two_sz: i64,
        site_count: usize,
        local_dim: usize,
        reason: String,
    },

    #[error("configuration {config} is not a member of the sector")]
    ConfigNotInSector { config: u64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("site index {site} out of range for a system of {site_count} sites")]
    SiteOutOfRange { site: usize, site_count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("density matrix violates positivity: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {matvecs} operator applications; best residuals {residuals:?}")]
    NoConvergence { matvecs: usize, residuals: Vec<f64> },

    #[error("requested {k} eigenpairs from a sector of dimension {dim}")]
    KExceedsDimension { k: usize, dim: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
