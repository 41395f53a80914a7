use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel evaluated at its singularity ({0})")]
    Singularity(&'static str),

    #[error("integrand returned a non-finite value at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    /// The folded integrand does not become integrable at t = 0: t·|g(t)|
    /// fails to decay across refinement levels, which happens when the input
    /// is not Hölder continuous at the evaluation point.
    #[error("folded integrand is not integrable at t = 0 (y = {y}); input is not Lipschitz/Hölder there")]
    NonLipschitzInput { y: f64 },

    #[error("growth class {kappa} is outside the admissible range ({reason})")]
    GrowthOutOfRange { kappa: f64, reason: &'static str },

    #[error("test function `{0}` has no closed-form derivative")]
    MissingDerivative(String),

    #[error("test function `{0}` has no closed-form antiderivative")]
    MissingAntiderivative(String),

    #[error("unknown test function label `{0}`")]
    UnknownFunction(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("empty catalog")]
    EmptyCatalog,

    #[error("rate fit needs at least two strictly positive points, got {0}")]
    DegenerateFit(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
