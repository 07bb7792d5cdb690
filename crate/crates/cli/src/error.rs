use std::fmt;

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input data (exit 2).
    Usage(String),
    /// Training produced a non-finite loss (exit 3).
    Diverged(String),
    /// Survival requested from a model fitted to unreflected data (exit 4).
    Provenance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Diverged(_) => 3,
            CliError::Provenance(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Diverged(m) => write!(f, "training diverged: {m}"),
            CliError::Provenance(m) => write!(f, "{m}"),
        }
    }
}

impl From<pickands::Error> for CliError {
    fn from(e: pickands::Error) -> Self {
        match e {
            pickands::Error::NonFinite { .. } => CliError::Diverged(e.to_string()),
            pickands::Error::Provenance(_) => CliError::Provenance(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(format!("csv error: {e}"))
    }
}
