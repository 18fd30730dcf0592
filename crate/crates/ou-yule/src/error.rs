use thiserror::Error;

/// Unified error type for simulation, statistics, and I/O operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside its mathematical domain (nonpositive rate, negative time, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampled series has (numerically) zero variance, so no correlation is defined.
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    /// Correlation overshot [-1, 1] beyond round-off tolerance.
    #[error("correlation {rho} outside [-1,1] by more than {tol}")]
    RhoOutOfRange { rho: f64, tol: f64 },

    /// Euler step factor |1 - theta*delta| >= 1: the recursion diverges.
    #[error("explosive Euler scheme: theta*delta = {0} >= 2")]
    ExplosiveScheme(f64),

    /// Continuous rate bound requested below its validity threshold T*.
    #[error("horizon T = {t} is not above the threshold T* = {t_star}")]
    BelowThreshold { t: f64, t_star: f64 },

    /// Exponential-moment bound needs beta >= 4*sqrt(variance).
    #[error("beta = {beta} below safety level {min} = 4*sqrt(variance)")]
    BetaTooSmall { beta: f64, min: f64 },

    /// Symmetric eigensolver did not converge.
    #[error("symmetric eigendecomposition failed to converge (m = {0})")]
    EigenFailure(usize),

    /// Too few samples for the requested summary.
    #[error("need at least {required} samples, got {got}")]
    EmptySample { required: usize, got: usize },

    /// Histogram requested with zero bins.
    #[error("histogram needs at least one bin")]
    ZeroBins,

    /// Ingested time grid is not uniform within the accepted relative tolerance.
    #[error("non-uniform grid: max relative mesh deviation {max_rel_dev:e} exceeds {tol:e}")]
    NonuniformGrid { max_rel_dev: f64, tol: f64 },

    /// More than the tolerated share of Monte Carlo replications were degenerate.
    #[error("{skipped} of {total} replications degenerate (> 1% tolerated)")]
    TooManySkips { skipped: usize, total: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input data (CSV parse failures and the like).
    #[error("parse error: {0}")]
    Parse(String),

    /// Command-line usage error; the binary maps this to exit code 2.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
