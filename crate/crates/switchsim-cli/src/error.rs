//! Harness-level errors. Display stays single-line so failures are
//! machine-parsable from stderr.

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("config: {reason}")]
    Config { reason: String },

    #[error("config field {field}: {reason}")]
    Field { field: &'static str, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("law {law}, trajectory {trajectory}: {source}")]
    Trajectory {
        law: String,
        trajectory: usize,
        #[source]
        source: switchsim::Error,
    },

    #[error(transparent)]
    Sim(#[from] switchsim::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
