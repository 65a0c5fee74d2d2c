use thiserror::Error;

/// Errors raised by the design-variable, objective and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    /// A point handed to the barrier is not strictly interior.
    #[error("point is not strictly interior: {slack} slack is {value:e}")]
    Domain { slack: String, value: f64 },

    #[error("design cannot be realized: {reason} (closest achievable control fidelity {closest_u:.6})")]
    InfeasibleRealization { reason: String, closest_u: f64 },

    #[error("no strictly feasible point found inside the bounds: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
