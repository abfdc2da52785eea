use std::path::PathBuf;

use thiserror::Error;

/// Problems with a run description. All of these map to exit code 1.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("`{key}` = \"{text}\": {reason}")]
    Unit { key: String, text: String, reason: String },

    #[error("{0}")]
    Invalid(String),

    #[error("unknown preset `{0}` (available: fig2a, fig2b, fig3, fig4, fig5, fig6)")]
    UnknownPreset(String),

    #[error("series `{series}`")]
    Physics {
        series: String,
        #[source]
        source: qsteer_core::error::Error,
    },
}

/// Failures while writing results.
#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("cannot serialise {path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}
