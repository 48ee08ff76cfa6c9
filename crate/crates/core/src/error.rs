use std::io;

use thiserror::Error;

/// Errors raised by the counting, sampling and experiment routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("incomparable weights: {left} vs {right}")]
    IncomparableWeights { left: u64, right: u64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A numeric argument violated the operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncation bound exceeded: n = {n} > {bound}")]
    TruncationExceeded { n: u64, bound: u64 },

    #[error("count table too small: need n_max >= {needed}, table has {available}")]
    TableTooSmall { needed: u64, available: u64 },

    #[error("enumeration cap exceeded: n = {n} > {cap}; use the Monte Carlo estimator instead")]
    EnumerationCap { n: u64, cap: u64 },

    #[error("support truncation leaves {mass:e} unaccounted mass (tolerance {tolerance:e})")]
    SupportLeak { mass: f64, tolerance: f64 },

    #[error("Boltzmann sampler gave up after {attempts} attempts")]
    RetryCap { attempts: u64 },

    #[error("cache format error: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
