use std::path::PathBuf;

/// Errors of the IO layer and the command-line tool. Numerical errors are
/// wrapped unchanged.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] toporeg_core::Error),
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("bundled fixture `{0}` is missing or malformed")]
    FixtureMissing(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable machine-readable error name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(e) => e.kind(),
            Error::BadDimensions(_) => "BadDimensions",
            Error::FixtureMissing(_) => "FixtureMissing",
            Error::Io { .. } => "Io",
            Error::Parse { .. } => "Parse",
            Error::Config(_) => "InvalidConfig",
        }
    }
}
