use std::f64::consts::PI;

use crate::abstraction::{
    Abstraction, AbstractionError, GridCover, InputGrid, RegionCostModel, RegionCosts, SampledSystem, TARGET,
};
use crate::hypergraph::{InputSet, SolveReport, StateId, ValueMap};
use crate::runtime::{solve_parallel, ParallelReport, SolveOptions};

use super::aircraft::{aircraft_field, AircraftField, AircraftParams, Tank};
use super::regions::ScenarioRegions;
use super::ScenarioError;

/// Grid resolution of the full-size synthesis (x1, x2, heading, speed).
pub const FULL_SCALE_CELLS: [u32; 4] = [200, 70, 75, 135];

/// Sampling, grid and input choices of the mission.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionPlan {
    pub params: AircraftParams,
    pub tau: f64,
    /// Reward per unit time over the fire.
    pub reward_rate: f64,
    pub substeps: usize,
    /// Cells per dimension: x1, x2, heading, speed.
    pub cells: [u32; 4],
    /// Speed interval covered by the grid; leaving it counts as overflow.
    pub speed_band: (f64, f64),
    /// Extra speed range, beyond the band, over which growth bounds hold.
    pub speed_margin: f64,
    pub thrust_levels: Vec<f64>,
    /// Bank angles in radians.
    pub bank_levels: Vec<f64>,
    pub p1: [f64; 4],
    /// Restrict the drop problem's terminal cost to cells inside fire times
    /// drop envelope (`+inf` elsewhere), so its controller hands over at the
    /// fire rather than wherever the landing value is low.
    pub handover_at_fire: bool,
    /// Upper bound on simulated samples per phase.
    pub max_steps: usize,
}

impl MissionPlan {
    /// Grid small enough for a workstation; see the README for the reasoning
    /// behind the speed band.
    pub fn desk_scale() -> Self {
        let deg = PI / 180.0;
        let params = AircraftParams::default();
        // Thrust balancing drag at the middle of the speed band.
        let cruise = params.drag * 54.0 * 54.0;
        Self {
            params,
            tau: 0.45,
            reward_rate: 5.0,
            substeps: 3,
            cells: [160, 104, 72, 1],
            speed_band: (53.0, 55.0),
            speed_margin: 2.0,
            thrust_levels: vec![0.0, cruise, 18e3],
            bank_levels: [-40.0, -20.0, 0.0, 20.0, 40.0].iter().map(|d| d * deg).collect(),
            p1: [840.0, 140.0, 0.0, 53.0],
            handover_at_fire: true,
            max_steps: 5000,
        }
    }

    pub fn cover(&self, regions: &ScenarioRegions) -> Result<GridCover<f64>, AbstractionError> {
        if self.cells.contains(&0) {
            return Err(AbstractionError::InvalidConfig("mission grids need at least one cell per dimension".into()));
        }
        let (lo, hi) = regions.scen;
        GridCover::new(
            vec![lo[0], lo[1], -PI, self.speed_band.0],
            vec![hi[0], hi[1], PI, self.speed_band.1],
            self.cells.to_vec(),
            vec![false, false, true, false],
        )
    }

    pub fn inputs(&self) -> Result<InputGrid<f64>, AbstractionError> {
        InputGrid::product(&[self.thrust_levels.clone(), self.bank_levels.clone()])
    }

    pub fn system(&self, tank: Tank) -> Result<SampledSystem<f64, AircraftField>, AbstractionError> {
        let range = (self.speed_band.0 - self.speed_margin, self.speed_band.1 + self.speed_margin);
        SampledSystem::new(aircraft_field(&self.params, tank, range), self.tau, self.substeps)
    }

    /// Stage cost `tau + u2^2` of each input.
    pub fn stage_costs(&self, inputs: &InputGrid<f64>) -> Vec<f64> {
        inputs.iter().map(|u| self.tau + u[1] * u[1]).collect()
    }

    pub fn reward(&self) -> f64 {
        -self.reward_rate * self.tau
    }
}

pub type ScenarioAbstraction = Abstraction<f64, AircraftField, RegionCostModel<f64>>;

/// Costs of the landing problem: `tau + u2^2` per step, `+inf` into the
/// avoid set or out of the operating range, `G' = 0` on runway cells inside
/// the landing envelope.
pub fn build_pi1(regions: &ScenarioRegions, plan: &MissionPlan, cover: &GridCover<f64>) -> Result<RegionCostModel<f64>, AbstractionError> {
    let inputs = plan.inputs()?;
    Ok(RegionCostModel::new(
        cover,
        &RegionCosts {
            safe: Some(regions.safe()),
            avoid: regions.avoid(),
            target: regions.target(),
            reward: None,
            stage: plan.stage_costs(&inputs),
        },
    ))
}

/// Costs of the drop problem: like [`build_pi1`] plus the reward `-5 tau` for
/// entering a cell inside fire times drop envelope (when `reward` is set),
/// with terminal cost `v1` (restricted to that zone with
/// [`MissionPlan::handover_at_fire`]).
pub fn build_pi2(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    v1: &ValueMap<f64>,
    reward: bool,
) -> Result<RegionCostModel<f64>, AbstractionError> {
    if v1.len() != cover.n_states() {
        return Err(AbstractionError::GridMismatch { expected: cover.n_states(), found: v1.len() });
    }
    let inputs = plan.inputs()?;
    let zone = regions.drop_zone();
    let model = RegionCostModel::new(
        cover,
        &RegionCosts {
            safe: Some(regions.safe()),
            avoid: regions.avoid(),
            target: if plan.handover_at_fire { zone.clone() } else { regions.target() },
            reward: reward.then(|| (zone, plan.reward())),
            stage: plan.stage_costs(&inputs),
        },
    );
    let mut terminal = v1.0.clone();
    if plan.handover_at_fire {
        for (c, t) in terminal.iter_mut().enumerate().take(cover.n_cells()) {
            if model.flags(c as StateId) & TARGET == 0 {
                *t = f64::INFINITY;
            }
        }
    }
    model.with_terminal_values(terminal)
}

pub fn abstraction(
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    tank: Tank,
    cost: RegionCostModel<f64>,
) -> Result<ScenarioAbstraction, AbstractionError> {
    Abstraction::new(plan.system(tank)?, cover.clone(), plan.inputs()?, cost)
}

/// Solved landing and drop problems on a shared grid.
#[derive(Debug, Clone)]
pub struct MissionSolution {
    pub cover: GridCover<f64>,
    pub pi1: ParallelReport<f64>,
    pub pi2: ParallelReport<f64>,
}

/// Solves the landing problem, then the drop problem with the landing values
/// as terminal cost.
pub fn synthesize_mission(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    opts: &SolveOptions,
    reward: bool,
) -> Result<MissionSolution, ScenarioError> {
    let cover = plan.cover(regions)?;
    let pi1 = solve_pi1(regions, plan, &cover, opts)?;
    if !pi1.report.converged {
        return Err(ScenarioError::NotConverged("landing"));
    }
    let cost2 = build_pi2(regions, plan, &cover, &pi1.report.values, reward)?;
    let abs2 = abstraction(plan, &cover, Tank::Full, cost2)?;
    let pi2 = solve_parallel(&abs2, opts)?;
    if !pi2.report.converged {
        return Err(ScenarioError::NotConverged("drop"));
    }
    Ok(MissionSolution { cover, pi1, pi2 })
}

pub fn solve_pi1(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    opts: &SolveOptions,
) -> Result<ParallelReport<f64>, ScenarioError> {
    let cost1 = build_pi1(regions, plan, cover)?;
    let abs1 = abstraction(plan, cover, Tank::Empty, cost1)?;
    Ok(solve_parallel(&abs1, opts)?)
}

/// Concrete running cost of a step ending in `next` under input `u`.
pub fn concrete_stage(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    u: &[f64],
    next: &[f64],
    reward: bool,
) -> f64 {
    if regions.avoid().contains_point(cover, next) || !regions.safe().contains_point(cover, next) {
        f64::INFINITY
    } else if reward && regions.drop_zone().contains_point(cover, next) {
        plan.reward()
    } else {
        plan.tau + u[1] * u[1]
    }
}

/// Concrete terminal cost of the landing problem.
pub fn concrete_terminal(regions: &ScenarioRegions, cover: &GridCover<f64>, x: &[f64]) -> f64 {
    if regions.target().contains_point(cover, x) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Phase of a trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Heading for the fire with a full tank.
    Drop,
    /// Returning to land with an empty tank.
    Land,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Drop => "A",
            Phase::Land => "B",
        }
    }
}

/// One sample of a closed-loop run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: [f64; 4],
    /// Input applied from this sample on; `None` at hand-over samples.
    pub u: Option<[f64; 2]>,
    pub phase: Phase,
    /// Cost charged at this sample: the running cost of the step it starts,
    /// or the terminal cost at the final hand-over.
    pub stage_cost: f64,
    pub cumulative: f64,
    pub handover: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    pub fn total_cost(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cumulative)
    }

    /// Sample indices of hand-over events.
    pub fn handovers(&self) -> Vec<usize> {
        self.rows.iter().enumerate().filter(|(_, r)| r.handover).map(|(i, _)| i).collect()
    }

    /// Number of drop-phase samples whose state lies in fire times drop
    /// envelope.
    pub fn dwell(&self, regions: &ScenarioRegions, cover: &GridCover<f64>) -> usize {
        let zone = regions.drop_zone();
        self.rows.iter().filter(|r| r.phase == Phase::Drop && zone.contains_point(cover, &r.x)).count()
    }

    pub fn final_state(&self) -> Option<[f64; 4]> {
        self.rows.last().map(|r| r.x)
    }
}

/// Controllers of both phases with the values they realize.
#[derive(Debug, Clone, Copy)]
pub struct MissionControllers<'a> {
    pub drop: &'a SolveReport<f64>,
    pub land: &'a SolveReport<f64>,
}

/// Runs the composed closed loop from `x0`: the drop controller with a full
/// tank until it hands over, then the landing controller with an empty tank
/// until it hands over. `reward` selects the concrete cost of the first phase.
pub fn simulate_mission(
    controllers: MissionControllers<'_>,
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    x0: [f64; 4],
    reward: bool,
) -> Result<Trajectory, ScenarioError> {
    let cover = plan.cover(regions)?;
    let inputs = plan.inputs()?;
    for r in [controllers.drop, controllers.land] {
        if r.values.len() != cover.n_states() {
            return Err(AbstractionError::GridMismatch { expected: cover.n_states(), found: r.values.len() }.into());
        }
    }
    let mut rows = Vec::new();
    let mut x = x0;
    let mut t = 0usize;
    let mut total = 0.0;
    check_state(regions, &cover, &x, 0)?;
    for (phase, report, tank) in
        [(Phase::Drop, controllers.drop, Tank::Full), (Phase::Land, controllers.land, Tank::Empty)]
    {
        let sys = plan.system(tank)?;
        let mut steps = 0usize;
        loop {
            let cell = cover.quantize(&x)?;
            if cell == cover.overflow() {
                return Err(ScenarioError::Violation { sample: t, reason: "left the grid".into() });
            }
            let value = report.values.get(cell);
            match report.controller.get(cell) {
                InputSet::All => {
                    if value == f64::INFINITY {
                        return Err(ScenarioError::NoController { sample: t, cell });
                    }
                    let charge = if phase == Phase::Land { concrete_terminal(regions, &cover, &x) } else { 0.0 };
                    total += charge;
                    rows.push(TrajectoryRow {
                        t: t as f64 * plan.tau,
                        x,
                        u: None,
                        phase,
                        stage_cost: charge,
                        cumulative: total,
                        handover: true,
                    });
                    break;
                }
                InputSet::One(u) => {
                    if steps == plan.max_steps {
                        return Err(ScenarioError::StepLimit(plan.max_steps));
                    }
                    let uv = inputs.get(u);
                    let next = sys.integrate(&x, uv, false)?;
                    let g = concrete_stage(regions, plan, &cover, uv, &next, reward && phase == Phase::Drop);
                    total += g;
                    rows.push(TrajectoryRow {
                        t: t as f64 * plan.tau,
                        x,
                        u: Some([uv[0], uv[1]]),
                        phase,
                        stage_cost: g,
                        cumulative: total,
                        handover: false,
                    });
                    let heading = (next[2] + PI).rem_euclid(2.0 * PI) - PI;
                    x = [next[0], next[1], heading, next[3]];
                    t += 1;
                    steps += 1;
                    check_state(regions, &cover, &x, t)?;
                }
            }
        }
    }
    Ok(Trajectory { rows })
}

fn check_state(regions: &ScenarioRegions, cover: &GridCover<f64>, x: &[f64; 4], sample: usize) -> Result<(), ScenarioError> {
    if regions.avoid().contains_point(cover, x) {
        return Err(ScenarioError::Violation { sample, reason: "entered the avoid set".into() });
    }
    if !regions.safe().contains_point(cover, x) {
        return Err(ScenarioError::Violation { sample, reason: "left the state constraint set".into() });
    }
    Ok(())
}

/// Abstract value of the cell holding `x`.
pub fn value_at(report: &SolveReport<f64>, cover: &GridCover<f64>, x: &[f64]) -> Result<f64, AbstractionError> {
    let c: StateId = cover.quantize(x)?;
    Ok(report.values.get(c))
}
