use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {field}: {reason}")]
    Config { field: String, reason: String },
    #[error("numerical failure at {point}: {source}")]
    Numerical {
        point: String,
        #[source]
        source: fridge_core::FridgeError,
    },
    #[error("{failed} of {total} points failed")]
    TooManyFailures { failed: usize, total: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } | CliError::TooManyFailures { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}
