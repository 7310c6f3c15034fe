use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition `{0}`")]
    InvalidPartition(String),

    #[error("size mismatch: lambda has size {lambda}, mu has size {mu}")]
    SizeMismatch { lambda: u32, mu: u32 },

    #[error("{what}: n = {n} exceeds the feasibility guard {limit}")]
    GuardExceeded { what: &'static str, n: u64, limit: u64 },

    #[error("bad range [{lo}, {hi}] for n = {n}")]
    BadRange { n: u32, lo: u32, hi: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no bound applies at n = {n}, t = {t}: {reason}")]
    NoRegime { n: u32, t: u32, reason: String },

    #[error("numeric breakdown: {0}")]
    Numeric(String),

    #[error("cache file {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPartition(_) => "invalid_partition",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::GuardExceeded { .. } => "guard_exceeded",
            Error::BadRange { .. } => "bad_range",
            Error::Precondition(_) => "precondition",
            Error::NoRegime { .. } => "no_regime",
            Error::Numeric(_) => "numeric",
            Error::CacheFormat { .. } => "cache_format",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
