use thiserror::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the toolkit.
///
/// Witness points are downcast to `[re, im]` pairs so the error type stays
/// independent of the scalar parameter.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix is singular: min gain {min_gain:.3e} at or below threshold {threshold:.3e}")]
    Singular { min_gain: f64, threshold: f64 },

    #[error("Dh is singular at the evaluation point (min gain {min_gain:.3e})")]
    DhSingular {
        point: Vec<[f64; 2]>,
        min_gain: f64,
    },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("integrand returned a non-finite value at a sample point")]
    IntegrandNonFinite { point: Vec<[f64; 2]> },

    #[error("hypothesis violated at stage `{stage}`: {detail}")]
    HypothesisViolated {
        stage: String,
        detail: String,
        witness: Option<Vec<[f64; 2]>>,
    },

    #[error("domain error: {context}")]
    DomainError { context: String },

    #[error("epsilon graph is disconnected; {suggestion}")]
    GraphDisconnected { suggestion: String },

    #[error("not a collision: {detail}")]
    NotACollision { detail: String },

    #[error("h(z1) = h(z2) in every component; this collision case is not transferable")]
    Case1Unsupported,

    #[error("degenerate Moebius denominator at diagonal index {index} (modulus {modulus:.3e})")]
    DegenerateDenominator { index: usize, modulus: f64 },

    #[error("precondition violated: {detail}")]
    PreconditionViolated { detail: String },

    #[error("monomial degree {degree} exceeds the per-variable cap {cap}")]
    DegreeTooHigh { degree: u32, cap: u32 },

    #[error("invalid perturbation: {detail}")]
    InvalidPerturbation { detail: String },

    #[error("internal consistency check failed: {detail}")]
    InternalInconsistency { detail: String },
}

impl Error {
    pub(crate) fn hypothesis(
        stage: impl Into<String>,
        detail: impl Into<String>,
        witness: Option<Vec<[f64; 2]>>,
    ) -> Self {
        Error::HypothesisViolated {
            stage: stage.into(),
            detail: detail.into(),
            witness,
        }
    }
}
