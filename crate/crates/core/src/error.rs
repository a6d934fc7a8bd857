use alloc::string::String;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument expected in `[-1, 1]` fell outside the clamp slack.
    #[error("argument {0} outside [-1, 1]")]
    Domain(f64),

    /// The operation needs a finite sphere dimension.
    #[error("operation requires a finite sphere dimension")]
    InfiniteDimension,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A kernel or integrand returned a non-finite value.
    #[error("function evaluation failed at (t, s) = ({t}, {s})")]
    Evaluation { t: f64, s: f64 },

    /// A kernel returned a non-finite value while assembling a Gram matrix.
    #[error("kernel evaluation failed at entry ({row}, {col})")]
    GramEntry { row: usize, col: usize },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    /// Point sampling could not reach the requested separation.
    #[error("could not sample {n} separated points after {rounds} resampling rounds")]
    Sampling { n: usize, rounds: usize },

    /// The interpolation matrix stayed singular after maximal regularization.
    #[error("interpolation matrix not positive definite (min eigenvalue {min_eigenvalue:e}, regularization {regularization:e})")]
    Singular {
        min_eigenvalue: f64,
        regularization: f64,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
