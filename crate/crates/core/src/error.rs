use thiserror::Error;

/// Errors raised while validating inputs or evaluating bounds.
///
/// Offending values are reported as `f64` regardless of the scalar type so
/// the error stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NegativeCell: {field} = {value}")]
    NegativeCell { field: String, value: f64 },

    #[error("InvalidProbability: {field} = {value} is outside [0, 1]")]
    InvalidProbability { field: String, value: f64 },

    #[error("NotNormalized: cells sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("DegenerateMargin: {margin} = {value} is too small to condition on")]
    DegenerateMargin { margin: String, value: f64 },

    #[error("ZeroConditioningEvent: {event} = {value}")]
    ZeroConditioningEvent { event: String, value: f64 },

    #[error("InvalidParams: {reason}")]
    InvalidParams { reason: String },

    #[error("ParamsOutsidePossibleRegion: {param} = {value} violates {constraint}")]
    ParamsOutsidePossibleRegion {
        param: String,
        value: f64,
        constraint: String,
    },

    #[error("EmptyInterval: lower bound {lo} exceeds upper bound {hi}")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("InfeasibleRegion: {reason}")]
    InfeasibleRegion { reason: String },

    #[error("InvalidWeights: {reason}")]
    InvalidWeights { reason: String },
}

impl Error {
    /// Machine-readable error code, shared by the CLI and the HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NegativeCell { .. } => "NegativeCell",
            Error::InvalidProbability { .. } => "InvalidProbability",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::DegenerateMargin { .. } => "DegenerateMargin",
            Error::ZeroConditioningEvent { .. } => "ZeroConditioningEvent",
            Error::InvalidParams { .. } => "InvalidParams",
            Error::ParamsOutsidePossibleRegion { .. } => "ParamsOutsidePossibleRegion",
            Error::EmptyInterval { .. } => "EmptyInterval",
            Error::InfeasibleRegion { .. } => "InfeasibleRegion",
            Error::InvalidWeights { .. } => "InvalidWeights",
        }
    }

    /// True for errors caused by a zero-mass conditioning event.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMargin { .. } | Error::ZeroConditioningEvent { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
