use thiserror::Error;

/// Errors raised by the factorizations, the QP subsolver, and the AVI solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix is singular (pivot {pivot:e} at column {index})")]
    Singular { index: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feasible set is empty")]
    Infeasible,

    #[error("QP subsolver exceeded {limit} inner iterations")]
    CycleLimit { limit: usize },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("problem too large for exhaustive enumeration (m = {m}, limit {limit})")]
    TooLarge { m: usize, limit: usize },

    #[error("no enumerated active set certifies a solution")]
    NoCertificate,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
