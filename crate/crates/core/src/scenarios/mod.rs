//! Firefighting aircraft case study: fly to a fire, drop water, return and
//! land. Two problems share one grid: the landing problem, and the drop
//! problem whose terminal cost is the landing value function.

mod aircraft;
mod mission;
mod regions;

pub use aircraft::{aircraft_field, AircraftField, AircraftParams, Tank};
pub use mission::{
    abstraction, build_pi1, build_pi2, concrete_stage, concrete_terminal, simulate_mission, solve_pi1,
    synthesize_mission, value_at, MissionControllers, MissionPlan, MissionSolution, Phase, ScenarioAbstraction,
    Trajectory, TrajectoryRow, FULL_SCALE_CELLS,
};
pub use regions::ScenarioRegions;

use thiserror::Error;

use crate::abstraction::AbstractionError;
use crate::hypergraph::StateId;
use crate::runtime::SolveError;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("the {0} problem did not converge")]
    NotConverged(&'static str),
    #[error("simulation violation at sample {sample}: {reason}")]
    Violation { sample: usize, reason: String },
    #[error("no controller at sample {sample}: cell {cell} has infinite value")]
    NoController { sample: usize, cell: StateId },
    #[error("simulation exceeded {0} samples in one phase")]
    StepLimit(usize),
}
