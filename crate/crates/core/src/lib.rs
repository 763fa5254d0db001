//! Optimal control on directed hypergraphs with a generalized
//! Bellman-Ford-Yen solver, a parallel memory-budgeted runtime, and
//! growth-bound abstractions of sampled nonlinear systems.

pub mod abstraction;
pub mod hypergraph;
pub mod io;
pub mod runtime;
pub mod scalar;
pub mod scenarios;

pub use scalar::Scalar;

/// Double-precision problem.
pub type Problem = hypergraph::DiscreteProblem<f64>;
/// Double-precision value map.
pub type Values = hypergraph::ValueMap<f64>;
