use thiserror::Error;

/// Errors raised by the library and surfaced by the CLI.
///
/// The variants double as exit-status classes: input problems, violated
/// mathematical preconditions, and failed internal self-checks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal verification failure: {0}")]
    Verification(String),
    #[error("division by zero")]
    DivisionByZero,
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn verification(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Precondition(_) | Error::DivisionByZero => 2,
            Error::Verification(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
