use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid setting: {0}")]
    InvalidSetting(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The atom location lies outside the range where the tail family exists.
    #[error("rho_out_of_range: rho = {rho} not in [{low}, {high}]")]
    RhoOutOfRange { rho: f64, low: f64, high: f64 },

    /// A quantile level too close to one for the tail integrals to be meaningful.
    #[error("quantile level {q} beyond 1 - 1e-9")]
    QuantileDomain { q: f64 },

    #[error("quadrature did not converge: error estimate {residual:e} exceeds {tolerance:e}")]
    Quadrature { residual: f64, tolerance: f64 },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("infeasible oracle configuration: {0}")]
    InfeasibleConfig(String),

    #[error("wrong constraint: {0}")]
    WrongConstraint(&'static str),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
