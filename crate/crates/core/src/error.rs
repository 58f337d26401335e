use std::fmt;

use thiserror::Error;

/// Which model invariant was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationKind {
    NotSymmetric,
    NotPSD,
    ZeroOutputVariance,
    DimensionMismatch,
    NonFinite,
}

impl fmt::Display for ValidationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationKind::NotSymmetric => "covariance is not symmetric",
            ValidationKind::NotPSD => "covariance is not positive semi-definite",
            ValidationKind::ZeroOutputVariance => "output variance is zero",
            ValidationKind::DimensionMismatch => "dimension mismatch",
            ValidationKind::NonFinite => "non-finite entry",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind}: {detail}")]
pub struct ModelValidationError {
    pub kind: ValidationKind,
    pub detail: String,
}

impl ModelValidationError {
    pub(crate) fn new(kind: ValidationKind, detail: impl Into<String>) -> Self {
        Self {
            kind,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ModelValidationError),

    #[error("dimension {p} exceeds the lattice cap of {cap}")]
    CapExceeded { p: usize, cap: usize },

    #[error("exact permutation enumeration supports p <= {max}, got p = {p}")]
    PermutationGuard { p: usize, max: usize },

    #[error("Monte Carlo budget exceeded: {required} model evaluations requested, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("subset error: {0}")]
    Subset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Format(String),
}
