//! Jacobi theta functions, Selberg integrals and their elliptic
//! generalization, with the singular quadrature needed to evaluate them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod elliptic;
pub mod error;
pub mod gamma;
pub mod quadrature;
pub mod simplex;
mod sum;
pub mod theta;

pub use conformal::{BlockCandidate, TransformReport};
pub use elliptic::{EpsLadder, SelbergJob, VerificationReport};
pub use error::{Error, Result};
pub use gamma::SelbergClassicalParams;
pub use num_complex::Complex64;
pub use quadrature::{AxisSingularitySpec, Extrapolation, Node, QuadratureResult};
pub use theta::{ModularPoint, ThetaLevelIndex};
