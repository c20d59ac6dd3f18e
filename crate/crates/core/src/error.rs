use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value is mathematically finite but not representable as an `f64`.
    #[error("range error: {0}")]
    Range(String),

    /// The full-space oracle refuses systems above its qubit guard.
    #[error("size error: N = {n} exceeds the limit of {max} qubits")]
    Size { n: usize, max: usize },

    /// Repeated raising walked off the top of the N+1 dimensional multiplet.
    #[error("state annihilated: raising |0...0> {k} times exceeds the multiplet of {n} qubits")]
    Annihilated { n: usize, k: usize },

    /// An iterative solver did not converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A self-check failed; points at a bug rather than at bad input.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("no cusp found: {0}")]
    NoCusp(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}
