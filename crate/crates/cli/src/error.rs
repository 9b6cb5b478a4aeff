use std::fmt;
use std::process::ExitCode;

/// Failure of a subcommand, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Reading or writing a file failed, or an input file is malformed.
    Io(String),
    /// Bad flags or configuration.
    Usage(String),
    /// A pipeline stage failed.
    Stage(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Stage(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Stage(m) => write!(f, "pipeline error: {m}"),
        }
    }
}

impl From<pbc::Error> for CliError {
    fn from(e: pbc::Error) -> Self {
        use pbc::Error as E;
        let msg = e.to_string();
        if e.stage().is_some() {
            return CliError::Stage(msg);
        }
        match e {
            E::Io { .. }
            | E::EmptyFile { .. }
            | E::RaggedRow { .. }
            | E::Parse { .. }
            | E::InvalidPoints(_) => CliError::Io(msg),
            _ => CliError::Usage(msg),
        }
    }
}

pub fn io_error(path: &std::path::Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub type CliResult<T> = Result<T, CliError>;
