use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shift sigma = {sigma} is not below the compatibility constant C = {c}; the admissible range is [sigma0, C)")]
    ShiftNotBelowC { sigma: f64, c: f64 },

    #[error("shift sigma = {sigma} lies below the admissibility threshold sigma0 = {sigma0}")]
    ShiftBelowSigma0 { sigma: f64, sigma0: f64 },

    #[error("no finite admissibility threshold sigma0 exists for this profile ({0})")]
    NoFiniteSigma0(String),

    #[error("non-finite value {value} of {what} at r = {r}")]
    NonFinite { what: &'static str, r: f64, value: f64 },

    #[error("{0} is not compactly supported inside the domain")]
    NotCompactlySupported(&'static str),

    #[error("{which}({t}) = {value} is not strictly positive")]
    NonPositivePair { which: &'static str, t: f64, value: f64 },

    #[error("{what} takes the negative value {value} at r = {r}")]
    NegativeValue { what: &'static str, r: f64, value: f64 },

    #[error("test function orthogonal to mu1 (denominator {0})")]
    OrthogonalToMu1(f64),

    #[error("non-finite quotient during minimization at iteration {iteration}")]
    NonFiniteQuotient { iteration: usize },

    #[error("hypotheses on the data are not satisfied: {0}")]
    AssumptionFailed(String),

    #[error("profile grid does not match the quadrature grid ({0})")]
    GridMismatch(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
