use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("offered load must be positive and finite, got {0}")]
    InvalidLoad(f64),

    #[error("{0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {refinements} refinements \
         (last estimates {previous:e} and {last:e})"
    )]
    Quadrature {
        refinements: u32,
        previous: f64,
        last: f64,
    },

    #[error("{what} did not converge within {iterations} iterations (bracket [{lo}, {hi}])")]
    IterationLimit {
        what: &'static str,
        iterations: u32,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
