use thiserror::Error;

/// Errors raised by the numerical toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A discretisation is too coarse for the requested operation.
    #[error("resolution guard: {0}")]
    Resolution(String),

    /// A kernel that must be symmetric is not.
    #[error("kernel is not symmetric (max defect {defect:e})")]
    AsymmetricKernel { defect: f64 },

    /// A potential violates its declared subdifferential bound.
    #[error("potential audit failed: {0}")]
    Potential(String),

    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations (last residual {last:e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residual_history: Vec<f64>,
    },

    /// A dense factorisation met a singular matrix.
    #[error("singular matrix")]
    Singular,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
