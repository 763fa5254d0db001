//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Seeds are fixed and printed. The desk-scale solves dominate the runtime
//! (several minutes single-threaded).

mod common;

use std::time::Instant;

use common::{
    containment_violations, seven_state, minmax_dijkstra, negative_cycle, oracle, point_in_cell, pred_superset_violations,
    random_problem, toy_aircraft_plan, B, G, NONNEG_SHAPE, ORACLE_SHAPE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symopt::abstraction::{CostModel, GridCover, RegionCostModel, REWARD, TARGET};
use symopt::hypergraph::*;
use symopt::runtime::{solve_parallel, working_set_bytes, CachePolicy, ParallelReport, SolveOptions};
use symopt::scenarios::*;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure explained by the host rather than the implementation.
    host_bound: bool,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into(), host_bound: false }
}

/// Running tally for the complexity guard.
#[derive(Default)]
struct Guard {
    runs: usize,
    violations: Vec<String>,
}

impl Guard {
    fn check(&mut self, what: &str, n: usize, sum_heads: u64, r: &SolveReport<f64>) {
        self.runs += 1;
        if r.sweeps > n || r.relaxations > n as u64 * sum_heads {
            self.violations.push(format!(
                "{what}: n {n}, sum|F| {sum_heads}, sweeps {}, relaxations {}",
                r.sweeps, r.relaxations
            ));
        }
    }

    fn check_problem(&mut self, what: &str, p: &DiscreteProblem<f64>, r: &SolveReport<f64>) {
        let heads = p.rows().map(|(_, _, h, _)| h.len() as u64).sum();
        self.check(what, p.n_states(), heads, r);
    }
}

fn golden() -> Outcome {
    let p = seven_state();
    let s = |k: StateId| k - 1;
    let x = [7, 4, 3].map(s);
    let y = [7, 5, 1].map(s);
    let j = |st: &[StateId], t: usize| cost_functional(&p, &SignalPrefix::new(st[..=t].to_vec(), vec![B; t])).unwrap();
    let js = [j(&x, 0), j(&x, 1), j(&x, 2), j(&y, 1), j(&y, 2), cost_functional(&p, &SignalPrefix::immediate(s(3))).unwrap()];
    let l7 = policy_performance(&p, &ControllerMap::uniform(7, 2, InputSet::One(B))).get(s(7));
    let r = bellman_ford_yen(&p, &PredIndex::new(&p));
    let oracle = value_iteration_oracle(&p, 100).values;
    let mu_ok = r.controller.get(s(6)) == InputSet::One(B)
        && [2, 4, 5, 7].iter().all(|&k| r.controller.get(s(k)) == InputSet::One(G))
        && r.controller.get(s(1)) == InputSet::All
        && r.controller.get(s(3)) == InputSet::All;
    let w_ok = r.values.0 == [1.0, -1.0, 3.0, 0.0, -1.0, -1.0, 0.0] && r.values == oracle;
    ok(
        js == [7.0, 5.0, 2.0, 6.0, 1.0, 3.0] && l7 == 2.0 && r.converged && mu_ok && w_ok,
        format!("J {js:?}, L(7) {l7}, W {:?}, controller ok {mu_ok}", r.values.0),
    )
}

fn oracle_equivalence(guard: &mut Guard) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut converged, mut mismatches) = (0, 0);
    for i in 0..200 {
        let p = random_problem(&mut rng, ORACLE_SHAPE);
        let r = bellman_ford_yen(&p, &PredIndex::new(&p));
        guard.check_problem(&format!("oracle instance {i}"), &p, &r);
        if r.converged {
            converged += 1;
            if r.values != oracle(&p) {
                mismatches += 1;
            }
        }
    }
    ok(mismatches == 0 && converged > 0, format!("{converged}/200 converged, {mismatches} mismatches"))
}

fn dijkstra_agreement(guard: &mut Guard) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut bad = 0;
    for i in 0..100 {
        let p = random_problem(&mut rng, NONNEG_SHAPE);
        let r = bellman_ford_yen(&p, &PredIndex::new(&p));
        guard.check_problem(&format!("dijkstra instance {i}"), &p, &r);
        if !r.converged || r.values.0 != minmax_dijkstra(&p) {
            bad += 1;
        }
    }
    ok(bad == 0, format!("{bad}/100 disagreements"))
}

fn negative_cycles(guard: &mut Guard) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut bad = 0;
    let mut total = 0;
    for n in 1..=64 {
        let p = negative_cycle(&mut rng, n);
        let r = bellman_ford_yen(&p, &PredIndex::new(&p));
        guard.check_problem(&format!("cycle instance n={n}"), &p, &r);
        total += 1;
        if r.converged || r.sweeps > n {
            bad += 1;
        }
    }
    ok(bad == 0, format!("{}/{total} reported converged=false within n sweeps", total - bad))
}

struct DeskRun {
    workers: usize,
    policy: CachePolicy,
    secs: f64,
    report: ParallelReport<f64>,
}

fn parallel_equivalence(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    guard: &mut Guard,
) -> (Outcome, SolveReport<f64>) {
    let n = cover.n_states();
    let m = plan.inputs().unwrap().len();
    let ws = working_set_bytes::<f64>(n, m, CachePolicy::Budgeted);
    let budget = ws + (512 << 20);
    let mut runs: Vec<DeskRun> = Vec::new();
    for workers in [1, 2, 4] {
        for policy in [CachePolicy::All, CachePolicy::Budgeted, CachePolicy::None] {
            let opts = SolveOptions::default().with_workers(workers).with_cache(policy).with_budget(budget);
            let started = Instant::now();
            let report = solve_pi1(regions, plan, cover, &opts).expect("desk solve");
            let secs = started.elapsed().as_secs_f64();
            println!(
                "    pi1 workers {workers} cache {policy:<8} {secs:>7.1} s, {} sweeps, converged {}, peak cache {} MiB",
                report.report.sweeps,
                report.report.converged,
                report.peak_cache_bytes >> 20
            );
            // Every image is non-empty, so sum |F(x,u)| >= n m.
            guard.check(&format!("desk pi1 {workers}/{policy}"), n, (n * m) as u64, &report.report);
            runs.push(DeskRun { workers, policy, secs, report });
        }
    }
    let base = &runs[0].report.report;
    let mut max_diff = 0.0f64;
    let mut all_converged = true;
    for r in &runs {
        all_converged &= r.report.report.converged;
        for (a, b) in r.report.report.values.0.iter().zip(&base.values.0) {
            if a != b {
                max_diff = max_diff.max((a - b).abs());
            }
        }
    }
    let budget_ok = runs
        .iter()
        .filter(|r| r.policy == CachePolicy::Budgeted)
        .all(|r| ws + r.report.peak_boundary_cache_bytes <= budget && ws + r.report.peak_cache_bytes <= budget);
    let t = |w: usize| runs.iter().find(|r| r.workers == w && r.policy == CachePolicy::All).unwrap().secs;
    let speedup = t(2) < t(1);
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    let pass = all_converged && max_diff <= 1e-12 && budget_ok && speedup;
    let detail = format!(
        "9 runs, converged {all_converged}, max |dW| {max_diff:e}, budget {budget} B respected {budget_ok}, \
         t1 {:.1} s vs t2 {:.1} s ({cores} core(s) available)",
        t(1),
        t(2)
    );
    let host_bound = !pass && all_converged && max_diff <= 1e-12 && budget_ok && cores < 2;
    let v1 = runs.swap_remove(0).report.report;
    (Outcome { pass, detail, host_bound }, v1)
}

fn soundness(regions: &ScenarioRegions, plan: &MissionPlan, cover: &GridCover<f64>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut bad = 0;
    for tank in [Tank::Empty, Tank::Full] {
        let cost = build_pi1(regions, plan, cover).unwrap();
        let abs = abstraction(plan, cover, tank, cost).unwrap();
        bad += containment_violations(&abs, 1000, &mut rng);
    }
    let (toy_regions, toy_plan) = toy_aircraft_plan();
    let toy_cover = toy_plan.cover(&toy_regions).unwrap();
    let toy = abstraction(&toy_plan, &toy_cover, Tank::Empty, build_pi1(&toy_regions, &toy_plan, &toy_cover).unwrap()).unwrap();
    let pred_bad = pred_superset_violations(&toy);
    ok(
        bad == 0 && pred_bad == 0,
        format!(
            "2000 sampled triples, {bad} outside F'; {} toy cells x {} inputs exhaustive, {pred_bad} missing predecessors",
            toy_cover.n_cells(),
            toy_plan.inputs().unwrap().len()
        ),
    )
}

fn mission(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    v1: &SolveReport<f64>,
) -> (Outcome, Vec<(&'static str, RegionCostModel<f64>)>) {
    let opts = SolveOptions::default();
    let mut dwell = Vec::new();
    let mut notes = Vec::new();
    let mut pass = v1.converged;
    let mut models = Vec::new();
    for reward in [true, false] {
        let cost2 = build_pi2(regions, plan, cover, &v1.values, reward).unwrap();
        let abs2 = abstraction(plan, cover, Tank::Full, cost2.clone()).unwrap();
        let started = Instant::now();
        let pi2 = solve_parallel(&abs2, &opts).unwrap().report;
        println!("    pi2 reward {reward}: {:.1} s, {} sweeps, converged {}", started.elapsed().as_secs_f64(), pi2.sweeps, pi2.converged);
        models.push((if reward { "drop (reward)" } else { "drop (no reward)" }, cost2));
        pass &= pi2.converged;
        match simulate_mission(MissionControllers { drop: &pi2, land: v1 }, regions, plan, plan.p1, reward) {
            Ok(traj) => {
                let zone = regions.drop_zone();
                let drop_rows: Vec<_> = traj.rows.iter().filter(|r| r.phase == Phase::Drop).collect();
                let entered = drop_rows.iter().any(|r| zone.contains_point(cover, &r.x));
                let handovers = traj.handovers();
                let first_handover = drop_rows.last().is_some_and(|r| r.handover);
                let landed = traj.final_state().is_some_and(|x| regions.target().contains_point(cover, &x));
                let clean = traj
                    .rows
                    .iter()
                    .all(|r| !regions.avoid().contains_point(cover, &r.x) && regions.safe().contains_point(cover, &r.x));
                let d = traj.dwell(regions, cover);
                pass &= entered && first_handover && handovers.len() == 2 && landed && clean;
                notes.push(format!(
                    "reward {reward}: entered {entered}, hand-overs {handovers:?}, landed {landed}, clean {clean}, dwell {d}, J {:.2}",
                    traj.total_cost()
                ));
                dwell.push(d);
            }
            Err(e) => {
                pass = false;
                notes.push(format!("reward {reward}: simulation failed: {e}"));
                dwell.push(0);
            }
        }
    }
    pass &= dwell[0] > dwell[1];
    (ok(pass, notes.join("; ")), models)
}

/// Samples concretizations and compares concrete against abstract costs.
fn domination(
    regions: &ScenarioRegions,
    plan: &MissionPlan,
    cover: &GridCover<f64>,
    v1: &SolveReport<f64>,
    drop_models: Vec<(&'static str, RegionCostModel<f64>)>,
) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let inputs = plan.inputs().unwrap();
    let mut models = vec![("landing", build_pi1(regions, plan, cover).unwrap())];
    models.extend(drop_models);
    let mut report = Vec::new();
    let mut pass = true;
    for (name, model) in models {
        let reward = name == "drop (reward)";
        let landing = name == "landing";
        let tank = if landing { Tank::Empty } else { Tank::Full };
        let abs = abstraction(plan, cover, tank, model).unwrap();
        let interesting: Vec<StateId> =
            (0..cover.n_cells() as StateId).filter(|&c| abs.cost().flags(c) & (TARGET | REWARD) != 0).collect();
        let (mut bad_g, mut bad_stage) = (0, 0);
        for i in 0..1000 {
            let cell = if i % 2 == 0 && !interesting.is_empty() {
                interesting[rng.gen_range(0..interesting.len())]
            } else {
                rng.gen_range(0..cover.n_cells() as StateId)
            };
            let x = point_in_cell(cover, cell, &mut rng);
            let concrete_terminal_cost = if landing {
                concrete_terminal(regions, cover, &x)
            } else if regions.drop_zone().contains_point(cover, &x) {
                // Hand-over to the landing controller, which guarantees V1'.
                v1.values.get(cell)
            } else {
                f64::INFINITY
            };
            if concrete_terminal_cost > abs.cost().terminal(cell) {
                bad_g += 1;
            }
            let u = rng.gen_range(0..inputs.len() as InputId);
            let heads = abs.transitions(cell, u);
            let (y_cell, g_abs) = heads[rng.gen_range(0..heads.len())];
            let y = if y_cell == cover.overflow() {
                let mut y = x.clone();
                y[0] = cover.upper()[0] + 1.0;
                y
            } else {
                point_in_cell(cover, y_cell, &mut rng)
            };
            let g = concrete_stage(regions, plan, cover, inputs.get(u), &y, reward);
            if g > g_abs {
                bad_stage += 1;
            }
        }
        pass &= bad_g == 0 && bad_stage == 0;
        report.push(format!("{name}: {bad_g} G, {bad_stage} g violations"));
    }
    ok(pass, format!("1000 samples per model; {}", report.join(", ")))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        // `cargo test -- --list` compatibility.
        return;
    }
    println!("acceptance seed {SEED}");
    let mut results: Vec<(&str, f64, Outcome)> = Vec::new();
    let mut guard = Guard::default();
    let timed = |name: &'static str, f: &mut dyn FnMut() -> Outcome, results: &mut Vec<(&str, f64, Outcome)>| {
        let started = Instant::now();
        let out = f();
        let secs = started.elapsed().as_secs_f64();
        println!("{} {name} ({secs:.1} s): {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        results.push((name, secs, out));
    };
    timed("golden-example-suite", &mut golden, &mut results);
    timed("oracle-equivalence", &mut || oracle_equivalence(&mut guard), &mut results);
    timed("dijkstra-agreement", &mut || dijkstra_agreement(&mut guard), &mut results);
    timed("negative-cycle-detection", &mut || negative_cycles(&mut guard), &mut results);

    let regions = ScenarioRegions::default();
    let plan = MissionPlan::desk_scale();
    let cover = plan.cover(&regions).unwrap();
    println!("    desk grid {:?}, {} states, {} inputs", plan.cells, cover.n_states(), plan.inputs().unwrap().len());
    let mut v1 = None;
    timed(
        "parallel-memory-equivalence",
        &mut || {
            let (out, w) = parallel_equivalence(&regions, &plan, &cover, &mut guard);
            v1 = Some(w);
            out
        },
        &mut results,
    );
    let v1 = v1.unwrap();
    timed("abstraction-soundness", &mut || soundness(&regions, &plan, &cover), &mut results);
    let mut drop_models = Vec::new();
    timed(
        "end-to-end-mission",
        &mut || {
            let (out, models) = mission(&regions, &plan, &cover, &v1);
            drop_models = models;
            out
        },
        &mut results,
    );
    let guard_out = ok(
        guard.violations.is_empty(),
        if guard.violations.is_empty() {
            format!("{} solves within sweeps <= n and relaxations <= n sum|F|", guard.runs)
        } else {
            guard.violations.join("; ")
        },
    );
    println!("{} complexity-guard: {}", if guard_out.pass { "PASS" } else { "FAIL" }, guard_out.detail);
    results.push(("complexity-guard", 0.0, guard_out));
    timed(
        "cost-domination-audit",
        &mut || domination(&regions, &plan, &cover, &v1, std::mem::take(&mut drop_models)),
        &mut results,
    );

    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("{passed}/{} criteria passed", results.len());
    let hard: Vec<&str> = results.iter().filter(|r| !r.2.pass && !r.2.host_bound).map(|r| r.0).collect();
    for r in results.iter().filter(|r| !r.2.pass && r.2.host_bound) {
        println!("note: {} fails only on its thread-speedup clause, which needs at least 2 cores", r.0);
    }
    if !hard.is_empty() {
        eprintln!("failed: {}", hard.join(", "));
        std::process::exit(1);
    }
}
