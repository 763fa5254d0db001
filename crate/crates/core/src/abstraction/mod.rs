//! Grid abstractions of sampled nonlinear systems.
//!
//! A cell's forward image is the set of cells met by a growth-bound box
//! around the flow of its center; predecessor supersets come from the
//! time-reversed flow. Costs are lifted from regions so that the abstract
//! problem never under-estimates the concrete one.

mod build;
mod enclosure;
mod field;
mod grid;
mod linalg;
mod region;

pub use build::{Abstraction, CostModel, PredBoxes, RegionCostModel, RegionCosts, REWARD, TARGET, UNSAFE};
pub use enclosure::EnclosureModel;
pub use field::{LinearField, SampledSystem, VectorField, DEFAULT_SUBSTEPS};
pub use grid::{GridCover, IndexBox, Rect};
pub use linalg::{expm, mat_vec};
pub use region::Region;

use thiserror::Error;

use crate::hypergraph::ProblemError;
use crate::scalar::Scalar;

/// Largest supported state dimension.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbstractionError {
    #[error("invalid abstraction setup: {0}")]
    InvalidConfig(String),
    #[error("non-finite state during integration or quantization")]
    NonFinite,
    #[error("grid mismatch: expected {expected} entries, found {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Finite list of input vectors of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct InputGrid<T> {
    dim: usize,
    len: usize,
    values: Vec<T>,
}

impl<T: Scalar> InputGrid<T> {
    pub fn new(inputs: Vec<Vec<T>>) -> Result<Self, AbstractionError> {
        let dim = inputs.first().map(Vec::len).ok_or_else(|| AbstractionError::InvalidConfig("input grid is empty".into()))?;
        if inputs.iter().any(|u| u.len() != dim) {
            return Err(AbstractionError::InvalidConfig("input vectors differ in dimension".into()));
        }
        if inputs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AbstractionError::InvalidConfig("input grid has non-finite entries".into()));
        }
        Ok(Self { dim, len: inputs.len(), values: inputs.into_iter().flatten().collect() })
    }

    /// Cartesian product of per-component levels; the last component varies
    /// fastest.
    pub fn product(levels: &[Vec<T>]) -> Result<Self, AbstractionError> {
        let mut out: Vec<Vec<T>> = vec![Vec::new()];
        for axis in levels {
            out = out.iter().flat_map(|p| axis.iter().map(move |&v| [p.as_slice(), &[v]].concat())).collect();
        }
        Self::new(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, u: crate::hypergraph::InputId) -> &[T] {
        let i = u as usize * self.dim;
        &self.values[i..i + self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.len as crate::hypergraph::InputId).map(|u| self.get(u))
    }
}
