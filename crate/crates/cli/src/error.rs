use std::fmt;

/// Why a command stopped, and the exit status it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration or input files.
    Config(String),
    /// A numerical routine failed (no convergence, pole, singular matrix).
    Numerical(gl3ff::Error),
    /// Writing the output failed.
    Io(std::io::Error),
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gl3ff::Error> for CliError {
    fn from(e: gl3ff::Error) -> Self {
        match e {
            gl3ff::Error::SectorMismatch(m) => CliError::Config(format!("sector mismatch: {m}")),
            gl3ff::Error::Invalid(m) => CliError::Config(m),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
