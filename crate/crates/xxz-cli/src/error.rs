use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    /// Some verification checks failed; the report was still written.
    Failed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Failed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<xxz_core::Error> for CliError {
    fn from(e: xxz_core::Error) -> Self {
        match e {
            xxz_core::Error::Config(m) | xxz_core::Error::Domain(m) => CliError::Config(m),
            xxz_core::Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}
