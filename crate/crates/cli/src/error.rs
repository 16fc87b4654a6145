use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file, or parameter combination.
    #[error("{0}")]
    Config(String),
    /// I/O or numerical failure while running.
    #[error("{0}")]
    Runtime(String),
    /// A verification suite ran but its pass criterion failed.
    #[error("verification failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) | CliError::Failed(_) => 2,
        }
    }
}

impl From<ostat::Error> for CliError {
    fn from(e: ostat::Error) -> Self {
        match e {
            ostat::Error::Numerical(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}
