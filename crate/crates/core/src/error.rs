//! Crate-wide error type.
//!
//! Every refusal required by an operation contract maps to a dedicated
//! variant so callers (and the CLI) can report the precondition that was
//! violated instead of a generic failure.

use thiserror::Error;

/// Alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two grid vectors (or a vector and a space family) disagree in length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A vector entry or parameter is NaN/infinite where a finite value is required.
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    /// Construction data for a space or process is invalid.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// The requested dual norm has no closed form for this space kind.
    #[error("no analytic dual norm for {kind}; use the intersection search instead")]
    UnsupportedAnalyticForm { kind: &'static str },

    /// A decomposition search would exceed its evaluation budget.
    #[error("dual-norm search budget exceeded: {evaluations} evaluations > {budget}")]
    SearchBudgetExceeded { evaluations: u128, budget: u128 },

    /// Partition hierarchies require driver mass at most one.
    #[error("driver mass {mass} exceeds 1; rescale the scenario first")]
    MassExceedsUnit { mass: f64 },

    /// A check was requested at a time where no process event occurs.
    #[error("t = {t} is not an event time of the scenario")]
    NotAnEventTime { t: f64 },

    /// Scaling factors must be strictly positive.
    #[error("scaling factor must be strictly positive, got {n}")]
    NonPositiveScale { n: f64 },

    /// Index out of range (basis projections, space indices, levels).
    #[error("{what} {got} out of range (max {max})")]
    OutOfRange { what: &'static str, got: usize, max: usize },

    /// Ensemble statistics need a minimum sample count.
    #[error("ensemble size {n} below the minimum {min}")]
    EnsembleTooSmall { n: usize, min: usize },

    /// The explicit Euler solver left the trusted regime.
    #[error("solver aborted at step {step}: {why} (|u| = {norm:.3e})")]
    SolverAbort { step: usize, why: &'static str, norm: f64 },
}

impl Error {
    /// Helper for invalid-construction errors.
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid { what, why: why.into() }
    }
}
