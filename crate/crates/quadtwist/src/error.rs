use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Mathematically invalid input or an unattainable request.
    #[error("domain error: {0}")]
    Domain(String),
    /// Bad configuration, unreadable input files, malformed options.
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    /// A numerical routine could not reach its target accuracy.
    #[error("numerical error: {0}")]
    Numeric(String),
    #[error("correction solver failed at degree {degree}: {msg}")]
    Solver { degree: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
