//! Principal-value quadrature for the exponentially decaying Hilbert-type
//! kernel `K(t) = 1/(e^t − e^{−t})`, the operators built from it, weighted
//! Schauder norm estimators and numerical certificates for the associated
//! boundedness and scaling-limit estimates.
//!
//! The crate is organised by role:
//!
//! * [`quadrature`]: adaptive Gauss–Kronrod engine with singularity folding
//!   and analytic tail bounds.
//! * [`funcspace`]: test functions, weights and norm estimators.
//! * [`operators`]: kernels and the operators `H`, `I` and `I_λ`.
//! * [`scaling_lab`]: bound certificates and the `λ → ∞` rate study.

pub mod error;
pub mod funcspace;
pub mod grid;
pub mod operators;
pub mod quadrature;
pub mod scaling_lab;

pub use error::{Error, Result};
pub use funcspace::{catalog, SchauderParams, TestFunction, WeightKind, Window};
pub use grid::GridSpec;
pub use operators::{OperatorKind, OperatorRequest};
pub use quadrature::{PVConfig, QuadResult};
pub use scaling_lab::{BoundCertificate, Claim, RateFit, DEFAULT_SEED};
