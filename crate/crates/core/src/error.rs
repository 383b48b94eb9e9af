//! Error taxonomy shared by every module.
//!
//! The CLI maps these onto exit codes: parameter/parse/domain/unsupported
//! problems are usage errors (exit 2), divergence and quadrature
//! non-convergence are numerical failures (exit 3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation outside a function's domain, or an invalid construction.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters violate a stated regime; the message names the condition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An integral that provably (or practically) diverges.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// Quadrature did not reach the requested tolerance within budget.
    #[error("numerical failure: {what} (best estimate {best:e}, error estimate {err:e})")]
    Numerical { what: String, best: f64, err: f64 },

    /// A function or step literal that does not match the grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// A catalog operation that is not registered for the given case.
    #[error("unsupported case: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
