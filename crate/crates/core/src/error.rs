//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors reported by constructors, region tests, solvers, and evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Problem parameters violate a documented precondition.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// Operation arguments violate a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested distortion cannot be met at any finite rate.
    #[error("rate infinite: {0}")]
    RateInfinite(String),

    /// The requested distortion tuple is unreachable for the problem.
    #[error("infeasible distortion: {0}")]
    InfeasibleDistortion(String),

    /// The exact characterization does not cover the queried point.
    #[error("characterization not applicable: {0}")]
    NotApplicable(String),

    /// A covariance matrix is singular or too ill-conditioned to use.
    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    /// Bisection bracket endpoints do not straddle a root.
    #[error("no sign change over [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    /// Pre-scan found two separated local maxima where one was required.
    #[error("objective is not unimodal on the bracket")]
    NotUnimodal,

    /// Input collection was empty where at least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Tensor or matrix sizes disagree with the declared shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A joint tensor would exceed the in-memory cell budget.
    #[error("tensor too large: {0} cells exceeds the 100000000-cell cap")]
    TensorTooLarge(usize),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
