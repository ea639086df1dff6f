use std::path::Path;

/// Command failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// A check or criterion did not hold (exit 1).
    Failed(String),
    /// Invalid arguments or parameters (exit 2).
    Usage(String),
    /// Unreadable, unparsable or unwritable file (exit 3).
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Failed(m) | CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

impl From<amulab::Error> for CliError {
    fn from(e: amulab::Error) -> Self {
        use amulab::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) | E::Json(_) | E::Csv(_) | E::Load(_) => CliError::Io(msg),
            E::NonConvergence { .. } => CliError::Failed(msg),
            _ => CliError::Usage(msg),
        }
    }
}
