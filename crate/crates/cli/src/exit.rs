use std::fmt;

/// Process exit codes. Each code has exactly one meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    /// Bad configuration or input, including unsupported diagnostics.
    Config = 1,
    IterationCap = 2,
    Divergence = 3,
    Certification = 4,
    /// Diagnostics asked for a window that was not recorded with stride 1.
    Stride = 5,
    AuditViolations = 6,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        CliError {
            exit,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Exit::Config, message)
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::config(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<triga::Error> for CliError {
    fn from(e: triga::Error) -> Self {
        let exit = match e {
            triga::Error::Selection { .. }
            | triga::Error::Certification { .. }
            | triga::Error::NoAdmissibleConstant(_) => Exit::Certification,
            triga::Error::Divergence { .. } => Exit::Divergence,
            _ => Exit::Config,
        };
        CliError::new(exit, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
