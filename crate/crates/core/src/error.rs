use std::path::PathBuf;

use thiserror::Error;

use crate::gridworld::Position;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("position {pos} is outside the {width}x{length} grid")]
    OutOfBounds { pos: Position, width: i32, length: i32 },
    #[error("row {row} is behind the AV front at row {front_row}; time to collision is undefined")]
    BehindAv { row: i32, front_row: i32 },
    #[error("invalid grid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("agent count must be between 1 and {max}, got {got}")]
    AgentCount { got: usize, max: usize },
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("only {available} valid spawn cells for {requested} agents")]
    InsufficientSpawns { requested: usize, available: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}
