//! Shared fixtures and reference solvers for the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use symopt::hypergraph::{value_iteration_oracle, DiscreteProblem, InputId, ProblemBuilder, StateId, ValueMap};

pub const B: InputId = 0;
pub const G: InputId = 1;

/// The seven-state, two-input example (inputs b = 0 and g = 1, state `s`
/// stored at index `s - 1`, `G(s) = s`).
pub fn seven_state() -> DiscreteProblem<f64> {
    let mut p = ProblemBuilder::new(7, 2);
    let arcs: [(usize, InputId, &[(usize, f64)]); 14] = [
        (1, B, &[(1, 1.0)]),
        (1, G, &[(2, 2.0)]),
        (2, B, &[(2, 1.0)]),
        (2, G, &[(3, -4.0)]),
        (3, B, &[(3, 1.0)]),
        (3, G, &[(2, 5.0)]),
        (4, B, &[(3, -2.0)]),
        (4, G, &[(1, -1.0), (2, -1.0)]),
        (5, B, &[(1, -1.0)]),
        (5, G, &[(3, -4.0)]),
        (6, B, &[(5, 0.0)]),
        (6, G, &[(3, -1.0)]),
        (7, B, &[(4, 1.0), (5, 1.0)]),
        (7, G, &[(6, 1.0)]),
    ];
    for (x, u, heads) in arcs {
        for &(y, c) in heads {
            p.arc(x - 1, u as usize, &[y - 1], c).unwrap();
        }
    }
    for s in 1..=7 {
        p.terminal(s - 1, s as f64).unwrap();
    }
    p.build().unwrap()
}

/// Shape of a random instance.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_states: usize,
    pub max_inputs: usize,
    pub max_heads: usize,
    /// Running costs are drawn from `[lo, hi]`, integers only so that sums
    /// are exact.
    pub cost: (i32, i32),
    pub terminal: (i32, i32),
    /// Probability of an infinite running or terminal cost.
    pub p_inf: f64,
}

pub const ORACLE_SHAPE: Shape =
    Shape { max_states: 32, max_inputs: 4, max_heads: 3, cost: (-3, 5), terminal: (0, 10), p_inf: 0.1 };
pub const NONNEG_SHAPE: Shape =
    Shape { max_states: 32, max_inputs: 4, max_heads: 3, cost: (0, 5), terminal: (0, 10), p_inf: 0.1 };

pub fn random_problem(rng: &mut impl Rng, shape: Shape) -> DiscreteProblem<f64> {
    let n = rng.gen_range(1..=shape.max_states);
    let m = rng.gen_range(1..=shape.max_inputs);
    let mut b = ProblemBuilder::new(n, m);
    let cost = |rng: &mut dyn rand::RngCore, range: (i32, i32)| {
        if rng.gen_bool(shape.p_inf) {
            f64::INFINITY
        } else {
            rng.gen_range(range.0..=range.1) as f64
        }
    };
    for x in 0..n {
        for u in 0..m {
            let k = rng.gen_range(1..=shape.max_heads.min(n));
            let heads = rand::seq::index::sample(rng, n, k);
            for y in heads.iter() {
                let c = cost(rng, shape.cost);
                b.arc(x, u, &[y], c).unwrap();
            }
        }
        let g = cost(rng, shape.terminal);
        b.terminal(x, g).unwrap();
    }
    b.build().unwrap()
}

#[derive(PartialEq)]
struct Key(f64, StateId);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Min-max Dijkstra (Knuth's superior-function generalization) for
/// non-negative running costs. A hyperarc `(x, u)` becomes usable once all its
/// heads are settled; its value is the max over heads of `g + W(y)`.
pub fn minmax_dijkstra(p: &DiscreteProblem<f64>) -> Vec<f64> {
    let n = p.n_states();
    let m = p.n_inputs();
    let mut users: Vec<Vec<(StateId, InputId)>> = vec![Vec::new(); n];
    let mut pending = vec![0usize; n * m];
    let mut worst = vec![f64::NEG_INFINITY; n * m];
    for x in 0..n as StateId {
        for u in 0..m as InputId {
            let (heads, _) = p.image(x, u);
            pending[x as usize * m + u as usize] = heads.len();
            for &y in heads {
                users[y as usize].push((x, u));
            }
        }
    }
    let mut best: Vec<f64> = p.terminal_costs().to_vec();
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Key> = (0..n as StateId).filter(|&x| best[x as usize].is_finite()).map(|x| Key(best[x as usize], x)).collect();
    while let Some(Key(v, y)) = heap.pop() {
        if done[y as usize] || v > best[y as usize] {
            continue;
        }
        done[y as usize] = true;
        for &(x, u) in &users[y as usize] {
            let i = x as usize * m + u as usize;
            let g = p.running_cost(x, y, u).unwrap();
            worst[i] = worst[i].max(g + v);
            pending[i] -= 1;
            if pending[i] == 0 && !done[x as usize] && worst[i] < best[x as usize] {
                best[x as usize] = worst[i];
                heap.push(Key(worst[i], x));
            }
        }
    }
    best
}

/// A chain feeding into a cycle whose total running cost is negative.
pub fn negative_cycle(rng: &mut impl Rng, n: usize) -> DiscreteProblem<f64> {
    let len = rng.gen_range(1..=n);
    let mut b = ProblemBuilder::new(n, 2);
    // Cycle over states 0..len with total cost -1 or less.
    for x in 0..len {
        let c = if x == 0 { -(len as f64) - rng.gen_range(1..4) as f64 } else { 1.0 };
        b.arc(x, 0, &[(x + 1) % len], c).unwrap();
        b.arc(x, 1, &[x], rng.gen_range(0..3) as f64).unwrap();
    }
    for x in len..n {
        let y = rng.gen_range(0..x);
        b.arc(x, 0, &[y], rng.gen_range(0..3) as f64).unwrap();
        b.arc(x, 1, &[x], 1.0).unwrap();
    }
    b.terminal(rng.gen_range(0..len), rng.gen_range(0..10) as f64).unwrap();
    b.build().unwrap()
}

/// Does the closed loop of `mu` cycle through states that do not hand over?
pub fn closed_loop_has_cycle(p: &DiscreteProblem<f64>, mu: &symopt::hypergraph::ControllerMap) -> bool {
    use symopt::hypergraph::InputSet;
    let n = p.n_states();
    let succ = |x: usize| -> Vec<StateId> {
        match mu.get(x as StateId) {
            InputSet::All => Vec::new(),
            InputSet::One(u) => p.image(x as StateId, u).0.to_vec(),
        }
    };
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, succ(root), 0usize)];
        state[root] = 1;
        while let Some((x, next, i)) = stack.last_mut() {
            if *i == next.len() {
                state[*x] = 2;
                stack.pop();
                continue;
            }
            let y = next[*i] as usize;
            *i += 1;
            match state[y] {
                1 => return true,
                0 => {
                    state[y] = 1;
                    stack.push((y, succ(y), 0));
                }
                _ => {}
            }
        }
    }
    false
}

use symopt::abstraction::{
    Abstraction, CostModel, GridCover, InputGrid, LinearField, Region, RegionCostModel, RegionCosts, SampledSystem,
    VectorField,
};
use symopt::scenarios::{MissionPlan, ScenarioRegions};

/// Double integrator `x1' = x2, x2' = u` on `[-1, 1]^2` steering into a box
/// around the origin while avoiding a bar.
pub fn double_integrator(cells: u32) -> Abstraction<f64, LinearField<f64>, RegionCostModel<f64>> {
    let cover = GridCover::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![cells, cells], vec![false, false]).unwrap();
    let field = LinearField::new(2, 1, vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 1.0]).unwrap();
    let sys = SampledSystem::new(field, 0.1, 5).unwrap();
    let inputs = InputGrid::product(&[vec![-1.0, 0.0, 1.0]]).unwrap();
    let costs = RegionCosts {
        safe: None,
        avoid: Region::from_box(vec![-0.6, 0.3], vec![-0.5, 1.0]),
        target: Region::from_box(vec![-0.2, -0.2], vec![0.2, 0.2]),
        reward: None,
        stage: vec![0.15, 0.1, 0.15],
    };
    let cost = RegionCostModel::new(&cover, &costs);
    Abstraction::new(sys, cover, inputs, cost).unwrap()
}

/// Small aircraft grid (3456 cells) with the mission's inputs.
pub fn toy_aircraft_plan() -> (ScenarioRegions, MissionPlan) {
    let mut plan = MissionPlan::desk_scale();
    plan.cells = [12, 8, 12, 3];
    plan.speed_band = (50.0, 58.0);
    (ScenarioRegions::default(), plan)
}

/// Uniform point of a bounded cell.
pub fn point_in_cell(cover: &GridCover<f64>, cell: StateId, rng: &mut impl Rng) -> Vec<f64> {
    let r = cover.cell_rect(cell);
    (0..cover.dim()).map(|d| rng.gen_range(r.lo[d]..r.hi[d])).collect()
}

/// Samples `(cell, point, input)` triples and counts endpoints whose cell is
/// not among the abstract successors.
pub fn containment_violations<F: VectorField<f64>, C: CostModel<f64>>(
    abs: &Abstraction<f64, F, C>,
    samples: usize,
    rng: &mut impl Rng,
) -> usize {
    let cover = abs.cover();
    let mut bad = 0;
    for _ in 0..samples {
        let cell = rng.gen_range(0..cover.n_cells() as StateId);
        let u = rng.gen_range(0..abs.inputs().len() as InputId);
        let x = point_in_cell(cover, cell, rng);
        let img = abs.image(cell, u);
        let hit = match abs.system().integrate(&x, abs.inputs().get(u), false) {
            Ok(y) => match cover.quantize(&y) {
                Ok(c) if c == cover.overflow() => img.overflow,
                Ok(c) => {
                    let mut found = false;
                    cover.for_each_cell(&img, |z| found |= z == c);
                    found
                }
                Err(_) => img.overflow,
            },
            Err(_) => img.overflow,
        };
        if !hit {
            bad += 1;
        }
    }
    bad
}

/// Pairs `(z, u, y)` with `y in F'(z, u)` but `z` missing from
/// `pred_superset(y, u)`, over the whole grid.
pub fn pred_superset_violations<F: VectorField<f64>, C: CostModel<f64>>(abs: &Abstraction<f64, F, C>) -> usize {
    let cover = abs.cover();
    let mut bad = 0;
    for u in 0..abs.inputs().len() as InputId {
        let preds: Vec<Vec<StateId>> = (0..cover.n_states() as StateId).map(|y| abs.pred_superset(y, u)).collect();
        for z in 0..cover.n_cells() as StateId {
            for (y, _) in abs.transitions(z, u) {
                if preds[y as usize].binary_search(&z).is_err() {
                    bad += 1;
                }
            }
        }
    }
    bad
}

/// Plain value iteration run to stabilisation.
pub fn oracle(p: &DiscreteProblem<f64>) -> ValueMap<f64> {
    let o = value_iteration_oracle(p, 100_000);
    assert!(o.stabilized, "oracle did not stabilise");
    o.values
}
