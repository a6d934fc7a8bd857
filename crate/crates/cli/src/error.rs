use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}, line {line}: {message}")]
    Format {
        context: &'static str,
        line: usize,
        message: String,
    },

    #[error("bad kernel label `{label}`: {message}")]
    Kernel { label: String, message: String },

    #[error(transparent)]
    Core(#[from] spherepd::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
