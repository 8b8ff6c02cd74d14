use thiserror::Error;

pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Numerics(spats::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Numerics(_) | CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

impl From<spats::Error> for CliError {
    fn from(e: spats::Error) -> Self {
        match e {
            spats::Error::Domain(msg) | spats::Error::Config(msg) => CliError::Usage(msg),
            other => CliError::Numerics(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
