use thiserror::Error;

/// Errors raised by the spectral, sequence and invasion routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("{lambda} is not an eigenvalue (|charpoly| = {residual:e})")]
    NotAnEigenvalue { lambda: String, residual: f64 },

    #[error("λI−H is singular at {0}")]
    SingularResolvent(String),

    #[error("{0} lies outside the resolvent set (|λ| ≤ 1)")]
    OutsideResolventSet(String),

    #[error("no interior minimum: probe at s={s} gives {value} below the bracketed minimum {v_star}")]
    NoInteriorMinimum { s: f64, value: f64, v_star: f64 },

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
