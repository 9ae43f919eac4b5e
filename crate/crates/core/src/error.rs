use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed CSV input. `row` is 1-based and counts the header as row 1.
    #[error("input error at row {row}: {message}")]
    Input { row: usize, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("enumeration needs {terms} terms, budget is {budget}; use the Monte Carlo estimator instead")]
    BudgetExceeded { terms: u128, budget: u64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Input { .. } => "input_error",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Empty(_) => "empty_input",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Divergent(_) => "divergent_integral",
            Error::Io(_) => "io_error",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
