use std::fmt;

use robust_tda::TdaError;

/// A failure mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<TdaError> for CliError {
    fn from(e: TdaError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else if matches!(e, TdaError::Io(_)) {
            CliError::Io(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
