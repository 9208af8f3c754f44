use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected configuration; reported like a usage error.
    #[error("invalid configuration: {0}")]
    Usage(String),

    #[error("{module} failed in {pipeline} ({params}): {source}")]
    Numeric {
        module: &'static str,
        pipeline: &'static str,
        params: String,
        #[source]
        source: kicktop::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("sidecar serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Process exit status: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
