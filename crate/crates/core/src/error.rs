use thiserror::Error;

/// Errors raised by the diagram engine and the moment pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Sizes that do not fit together, or exceed the enumeration cap.
    #[error("size error: {0}")]
    Size(String),

    /// A dense operator on (C^d)^t, or a dense Gram matrix, would exceed the
    /// configured side-length cap.
    #[error("dense matrix side {required} exceeds the cap of {cap}")]
    MemoryCap { required: u128, cap: usize },

    #[error("numerical failure at t={t}, d={d}: {reason}")]
    Computation { t: usize, d: usize, reason: String },

    /// Input violates a documented precondition (e.g. non-Hermitian operator).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Symmetry that must hold by construction did not.
    #[error("structural inconsistency: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;
