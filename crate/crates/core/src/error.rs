use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed rational value {0:?}")]
    BadValue(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("error parameter k must be at least 4, got {0}")]
    BadK(u32),

    #[error("value {0} lies outside (0, 1]; scale the instance first")]
    ValueOutOfRange(String),

    #[error("job {job} is adjacent to a non-contiguous set of machines")]
    NonIntervalJob { job: String },

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("infeasible assignment: {0}")]
    InfeasibleAssignment(String),

    #[error("input vector is not dominated by the instance vector")]
    VectorOutOfRange,

    #[error("guess t must be positive")]
    NonPositiveGuess,

    #[error("delta must lie strictly between 0 and 1")]
    BadDelta,

    #[error("invalid generator parameters: {0}")]
    BadGeneratorParams(String),

    #[error("no success entry in the first row of the table")]
    NoSolution,

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
