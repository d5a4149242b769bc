use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: &'static str, message: String },

    #[error(
        "sensing infeasible at x = {x} m: full power toward the target gives {available:e}, threshold is {required:e}"
    )]
    InfeasibleSensing { x: f64, available: f64, required: f64 },

    #[error("scenario infeasible: {0}")]
    InfeasibleScenario(String),

    #[error("invalid endpoints: {0}")]
    InvalidEndpoints(String),

    #[error("zero channel vector")]
    ZeroVector,

    #[error("oracle grid has no feasible point")]
    EmptyOracleGrid,

    #[error("rate not differentiable at x = {x} m (left slope {left}, right slope {right})")]
    NonDifferentiablePoint { x: f64, left: f64, right: f64 },

    #[error("segment {index}: {message}")]
    InvariantViolation { index: usize, message: String },

    #[error("segment {index}: sensing constraint cannot be met with the tagged precoder")]
    SensingConstraintViolation { index: usize },

    #[error("empty table")]
    EmptyTable,

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the scenario itself rather than bad input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleSensing { .. }
                | Error::InfeasibleScenario(_)
                | Error::InvalidEndpoints(_)
                | Error::SensingConstraintViolation { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
