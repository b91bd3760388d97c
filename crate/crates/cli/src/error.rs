use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] sinrtail::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    /// 1 for invariant breaches, 2 for bad input, 3 for numeric or I/O
    /// failures.
    pub fn exit_code(&self) -> u8 {
        use sinrtail::Error as E;
        match self {
            CliError::Verify(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Core(E::Domain(_) | E::Regime(_) | E::Coverage(_) | E::Degenerate(_)) => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Validation(msg.into()))
}
