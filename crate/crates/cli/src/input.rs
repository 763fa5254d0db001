use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use symopt::abstraction::GridCover;
use symopt::io::{grid_hash, read_problem, ConfigKind, LinearSpec, MissionSpec, NO_GRID};
use symopt::Problem;

/// A loaded input file.
pub enum Input {
    Problem(Problem),
    Linear(Box<LinearSpec>),
    Mission(Box<MissionSpec>),
}

pub struct Loaded {
    pub input: Input,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
}

/// Flat problem files start (after comments) with a `states` line.
fn is_problem(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.split_whitespace().next() == Some("states"))
}

pub fn load(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let input = if is_problem(&text) {
        Input::Problem(read_problem(&text).with_context(|| format!("{}", path.display()))?)
    } else {
        match ConfigKind::parse(&text).with_context(|| format!("{}", path.display()))? {
            ConfigKind::Linear(l) => Input::Linear(l),
            ConfigKind::Mission(m) => Input::Mission(m),
        }
    };
    Ok(Loaded { input, sha256 })
}

impl Input {
    pub fn cover(&self) -> Result<Option<GridCover<f64>>> {
        Ok(match self {
            Input::Problem(_) => None,
            Input::Linear(l) => Some(l.cover.clone()),
            Input::Mission(m) => Some(m.plan.cover(&m.regions)?),
        })
    }

    pub fn grid(&self) -> Result<String> {
        Ok(self.cover()?.map_or_else(|| NO_GRID.to_string(), |c| grid_hash(&c)))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Input::Problem(_) => "problem",
            Input::Linear(_) => "linear",
            Input::Mission(_) => "mission",
        }
    }
}
