use std::path::PathBuf;

/// Failures that stop a run before a report exists.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit status.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
