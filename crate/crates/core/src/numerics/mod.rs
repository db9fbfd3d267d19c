//! Regression engine: B-spline bases, penalized additive least squares with
//! GCV smoothing selection, term-wise F tests and componentwise boosting.

mod additive;
mod boost;
mod spline;

pub use additive::{
    fit_additive, fit_additive_with, lambda_grid, term_significance, AdditiveFit, Smoothing,
};
pub use boost::{boost_select, boost_select_with, BoostOptions, BoostTrace};
pub use spline::{difference_penalty, make_basis, SplineBasis};

/// Basis functions per predictor unless configured otherwise.
pub const DEFAULT_NUM_BASIS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("degenerate column: {reason}")]
    DegenerateColumn { reason: String },
    #[error("singular penalized design")]
    SingularFit,
    #[error("non-finite value in regression inputs")]
    InvalidData,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
