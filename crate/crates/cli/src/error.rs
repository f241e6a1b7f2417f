use std::path::PathBuf;

use sap_core::SapError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("config file {path}, line {line}: unknown key `{key}`")]
    UnknownKey {
        path: PathBuf,
        line: usize,
        key: String,
    },

    #[error("config file {path}, line {line}: expected `key = value`")]
    Syntax { path: PathBuf, line: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("record has {got} fields but schema `{schema}` has {expected} columns")]
    Schema {
        schema: &'static str,
        expected: usize,
        got: usize,
    },

    #[error(transparent)]
    Core(#[from] SapError),

    #[error("selftest failed: {failed} check(s) did not pass")]
    SelftestFailed { failed: usize },
}

impl CliError {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        CliError::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    /// 0 success, 1 I/O, 2 configuration, 3 numerical failure, 4 selftest failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Csv { .. } | CliError::Schema { .. } => 1,
            CliError::Config { .. } | CliError::UnknownKey { .. } | CliError::Syntax { .. } => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::SelftestFailed { .. } => 4,
        }
    }
}
