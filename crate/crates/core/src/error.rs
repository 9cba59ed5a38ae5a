use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("grid of {actual} points is too coarse, at least {required} required")]
    GridTooCoarse { required: usize, actual: usize },

    #[error("{what} not normalized: total = {total}")]
    NotNormalized { what: &'static str, total: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("negative spectral weight {value} at k = {k}")]
    NegativeWeight { k: i64, value: f64 },

    #[error(
        "Fourier coefficient at k = {k} has imaginary part {imag}; not a positive-definite overlap"
    )]
    ComplexCoefficient { k: i64, imag: f64 },

    #[error("bisection bracket does not contain the target second moment {sigma2}")]
    BracketFailure { sigma2: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("the overlap shortcut requires a uniform prior")]
    NonUniformPrior,

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("invalid seed pair at index {index}: |a|^2 + |b|^2 = {total}")]
    InvalidSeedPair { index: usize, total: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
