use thiserror::Error;

/// Errors raised by the evaluators, solvers and samplers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// The argument is inside the domain but outside the range where the
    /// chosen representation is certified.
    #[error("range error in {what}: {detail}")]
    Range { what: &'static str, detail: String },

    /// Grid, tolerance or run parameters are unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// An internal numerical procedure failed to converge.
    #[error("{what} did not converge: {detail}")]
    Convergence { what: &'static str, detail: String },

    /// A stochastic sample could not be completed.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// A sample is too small or degenerate for the requested statistic.
    #[error("statistics error: {0}")]
    Statistics(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}

pub(crate) fn range(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Range {
        what,
        detail: detail.into(),
    }
}

pub(crate) fn require_finite(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(what, format!("argument {x} is not finite")))
    }
}
