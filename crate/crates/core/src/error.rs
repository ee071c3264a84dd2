use std::path::{Path, PathBuf};

use thiserror::Error;

/// A planner or world parameter outside its admissible range.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{name}`: {reason}")]
pub struct ParamError {
    pub name: &'static str,
    pub reason: String,
}

impl ParamError {
    pub fn new(name: &'static str, reason: impl Into<String>) -> Self {
        Self {
            name,
            reason: reason.into(),
        }
    }
}

/// Malformed map or obstacle input.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("map is empty")]
    Empty,
    #[error("row {row}: expected {expected} columns, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {col}: unexpected character {ch:?}")]
    BadChar { row: usize, col: usize, ch: char },
    #[error("record {index}: {reason}")]
    BadRecord { index: usize, reason: String },
    #[error("obstacle csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Scenario, report and export failures.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: Box<BenchError> },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("`{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("no scenario files (*.toml) in {}", .0.display())]
    EmptySuite(PathBuf),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Mismatch(String),
}

impl BenchError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Attaches the file a parse or validation error came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (BenchError::Io { .. } | BenchError::File { .. }) => e,
            e => BenchError::File {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }
}
