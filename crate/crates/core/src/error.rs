use thiserror::Error;

/// Errors raised by the solvers, generators and parameter rules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains non-finite values: {0}")]
    NonFinite(&'static str),

    #[error("matrix has an empty spectrum (all singular values vanish)")]
    EmptySpectrum,

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("value {value} outside the invertible range (0, {max}]")]
    OutOfRange { value: f64, max: f64 },

    #[error("no reconstruction: threshold {alpha} exceeds the largest eigenvalue {top}")]
    EmptyReconstruction { alpha: f64, top: f64 },

    #[error("forward Euler step {h} is unstable (needs h < {limit})")]
    UnstableStep { h: f64, limit: f64 },

    #[error("no sign change in [{lo}, {hi}]: h(lo) = {h_lo}, h(hi) = {h_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        h_lo: f64,
        h_hi: f64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
