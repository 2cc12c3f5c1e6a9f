use thiserror::Error;

/// Errors raised by models, integrators and the benchmark harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid circulation at vortex {index}: circulations must be nonzero")]
    InvalidCirculation { index: usize },

    #[error("singular vortex configuration: vortices {i} and {j} coincide")]
    SingularConfiguration { i: usize, j: usize },

    #[error("near collision between vortices {i} and {j} (distance {distance:e})")]
    NearCollision { i: usize, j: usize, distance: f64 },

    #[error("invalid composition order {0}: expected an even integer >= 4")]
    InvalidOrder(u32),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("reference oracle failed to converge: {0}")]
    OracleFailure(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
