//! Finite optimal control problems on directed hypergraphs.
//!
//! A problem `(X, U, F, G, g)` has finitely many states and inputs; `F(x, u)`
//! is a non-empty set of successors (a hyperarc), `G` the terminal cost paid
//! at hand-over and `g` the running cost of each transition. The value of a
//! state is the best worst-case cost over static controllers, the maximal
//! fixed point of the dynamic programming operator.

mod bfy;
mod pred;
mod problem;
mod semantics;

pub use bfy::bellman_ford_yen;
pub use pred::{predecessors, PaddedPredecessors, PredIndex, Predecessors};
pub use problem::{
    ControllerMap, DiscreteProblem, InputId, InputSet, ProblemBuilder, SignalPrefix, SolveReport, StateId, ValueMap,
};
pub use semantics::{cost_functional, dp_operator, policy_performance, value_iteration_oracle, OracleOutcome};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("F({state},{input}) is empty")]
    EmptyImage { state: StateId, input: InputId },
    #[error("state index {state} out of range (n_states = {n_states})")]
    StateOutOfRange { state: usize, n_states: usize },
    #[error("input index {input} out of range (n_inputs = {n_inputs})")]
    InputOutOfRange { input: usize, n_inputs: usize },
    #[error("invalid cost for {what}: costs must not be NaN or -inf")]
    InvalidCost { what: String },
    #[error("problem needs at least one input")]
    NoInputs,
    #[error("{0} states exceed the supported maximum")]
    TooManyStates(usize),
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
}
