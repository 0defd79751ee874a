use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// An emitted object failed its own invariant check.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{message}")]
    Inadmissible { message: String, report: serde_json::Value },

    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Inadmissible { .. } => 3,
        }
    }
}

impl From<qgt_core::Error> for CliError {
    fn from(e: qgt_core::Error) -> Self {
        use qgt_core::Error as E;
        match e {
            E::InvalidSignature { .. } | E::InvalidParameter(_) | E::UnknownState(_) | E::Unsupported(_) => {
                CliError::Usage(e.to_string())
            }
            E::Inadmissible(_) | E::NonConvergent { .. } => CliError::Inadmissible {
                message: e.to_string(),
                report: serde_json::Value::Null,
            },
            E::Io(m) => CliError::Io(m),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
