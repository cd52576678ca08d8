use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    Pole(Complex64),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("precondition violated: {0} (apply decompose_shift to normalize the parameters)")]
    Precondition(String),

    #[error("Nørlund coefficient g_{n} overflows the floating range; use the ratio form")]
    Overflow { n: usize },

    #[error("series did not converge at z = {z} after {terms} terms")]
    NonConvergence { z: Complex64, terms: usize },

    #[error("degenerate denominator in terminating 2F1 at k = {k} (n = {n})")]
    Degenerate { n: usize, k: usize },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("every pole cancelled over the scanned window (depth {depth})")]
    NoPoles { depth: usize },

    #[error("rate not fittable: {0}")]
    NonFittable(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NonConvergence { .. }
                | Error::Degenerate { .. }
                | Error::NoPoles { .. }
                | Error::NonFittable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
