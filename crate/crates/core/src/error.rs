use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("theta series needs {needed} terms, cap is {cap}")]
    NonConvergent { needed: usize, cap: usize },

    #[error("theta1'(0) underflows for tau = {tau}")]
    DivisionDegenerate { tau: Complex64 },

    #[error("branch of log E is ambiguous near t = {t}")]
    BranchAmbiguous { t: f64 },

    #[error("{what} is within the lattice threshold (|theta1| = {magnitude:e})")]
    PoleProximity { what: &'static str, magnitude: f64 },

    #[error("gamma pole: {factor} has argument {z} at a non-positive integer")]
    PoleAtNonPositiveInteger { z: Complex64, factor: String },

    #[error("continuation pole: c + m = {value} for subtraction order {m}")]
    ContinuationPole { value: Complex64, m: u32 },

    #[error("integrand is not finite at u = {u}")]
    NonFinite { u: f64 },

    #[error("extrapolation needs at least 3 samples, got {0}")]
    InsufficientSamples(usize),

    #[error("extrapolation samples are not geometrically spaced")]
    NonGeometricSpacing,

    #[error("extrapolation tableau corrections do not decrease ({first:e} -> {last:e})")]
    ExtrapolationUnstable { first: f64, last: f64 },

    #[error("tolerance not reached: error estimate {err:e} exceeds {tol:e}")]
    ToleranceNotReached { err: f64, tol: f64 },

    #[error("axis {axis}: {source}")]
    Axis {
        axis: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn on_axis(self, axis: usize) -> Self {
        Error::Axis {
            axis,
            source: Box::new(self),
        }
    }

    /// Strips axis tags added by nested cubature.
    pub fn root(&self) -> &Error {
        match self {
            Error::Axis { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
