//! Production execution of the solver: worker pool, transition cache under a
//! byte budget, per-sweep metrics.

mod cache;
mod metrics;
mod parallel;
mod source;

pub use cache::{slot_table_bytes, CachePolicy, TransitionCache, ENTRY_OVERHEAD};
pub use metrics::{write_metrics_csv, SweepMetrics};
pub use parallel::{solve_parallel, working_set_bytes, ParallelReport, SolveOptions};
pub use source::{ProblemSource, TransitionSource};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("memory budget of {budget} bytes is below the minimal feasible budget of {minimum} bytes")]
    BudgetTooSmall { budget: usize, minimum: usize },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
}
