//! File formats: flat problem text, value and controller artifacts (text and
//! binary), key=value configuration files and trajectory CSVs.

mod artifact;
mod config;
mod problem;
mod scenario;
mod trajectory;

pub use artifact::{
    grid_hash, read_binary, read_controller_text, read_values_text, write_binary, write_controller_text,
    write_values_text, Artifact, BINARY_MAGIC, BINARY_VERSION, NO_GRID,
};
pub use config::{Config, Entry};
pub use problem::{parse_problem, read_problem, write_problem};
pub use scenario::{parse_linear, parse_mission, ConfigKind, LinearSpec, MissionSpec};
pub use trajectory::{write_plot_data, write_trajectory_csv, TRAJECTORY_HEADER};

use thiserror::Error;

use crate::abstraction::AbstractionError;
use crate::hypergraph::ProblemError;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: key `{key}`: {msg}")]
    Key { line: usize, key: String, msg: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("grid hash mismatch: artifact has {found}, configuration has {expected}")]
    GridMismatch { expected: String, found: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}
