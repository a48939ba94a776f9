use thiserror::Error;

/// Failures of a command, each with its process exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Refused(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<xxz_pin::Error> for CliError {
    fn from(e: xxz_pin::Error) -> Self {
        use xxz_pin::Error as E;
        let msg = e.to_string();
        match e {
            E::CertificateRefused(_) | E::Unsupported(_) => CliError::Refused(msg),
            E::NoConvergence(_)
            | E::ClosedFormMismatch { .. }
            | E::SectorCoupling { .. }
            | E::ClusterFillsK { .. } => CliError::Numerical(msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
