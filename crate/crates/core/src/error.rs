use thiserror::Error;

/// Errors raised by the constitutive laws, the solvers and the configuration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),

    #[error(
        "logarithm argument of the thermal free energy is non-positive at theta = {theta} K (theta0 = {theta0} K)"
    )]
    ThermalLogDomain { theta: f64, theta0: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integration aborted at t = {time} ms: {reason}")]
    IntegrationAbort { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
