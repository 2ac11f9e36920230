//! IO side of the workspace: text formats for graphs and certificates,
//! report rendering, and the command implementations behind the
//! `rayforest` binary.

pub mod commands;
pub mod formats;

/// Process-level outcome of a command, mapped onto exit codes:
/// 0 success, 1 usage, 2 unreadable or unparseable input, 3 failed
/// verification, 4 exhausted search budget.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Verification(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Verification(m) => write!(f, "verification failure: {m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
