use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exceeded: {what} needs 2^{needed:.2}, budget is 2^{budget}")]
    Budget { what: String, needed: f64, budget: u32 },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine readable kind, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } | Error::Input(_) => "input",
            Error::Precondition(_) => "precondition",
            Error::Budget { .. } => "budget",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
