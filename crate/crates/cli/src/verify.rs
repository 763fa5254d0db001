use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symopt::abstraction::{Abstraction, CostModel, VectorField};
use symopt::hypergraph::{
    bellman_ford_yen, dp_operator, policy_performance, value_iteration_oracle, InputId, PaddedPredecessors, PredIndex,
    ProblemBuilder, StateId,
};
use symopt::scenarios::{abstraction, build_pi1, Tank};
use symopt::Problem;

use crate::input::Input;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Default)]
pub struct Report {
    pub lines: Vec<(Status, String, String)>,
}

impl Report {
    fn add(&mut self, status: Status, name: &str, detail: impl Into<String>) {
        let detail = detail.into();
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        println!("{tag} {name}: {detail}");
        if status == Status::Skip {
            log::warn!("{name} skipped: {detail}");
        }
        self.lines.push((status, name.into(), detail));
    }

    fn check(&mut self, pass: bool, name: &str, detail: impl Into<String>) {
        self.add(if pass { Status::Pass } else { Status::Fail }, name, detail);
    }

    pub fn failed(&self) -> bool {
        self.lines.iter().any(|l| l.0 == Status::Fail)
    }
}

pub struct VerifyArgs {
    pub oracle_max_states: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Solver invariants on an explicit problem.
pub fn verify_problem(p: &Problem, args: &VerifyArgs, rep: &mut Report, label: &str) {
    let n = p.n_states();
    let preds = PredIndex::new(p);
    let r = bellman_ford_yen(p, &preds);
    let heads: u64 = p.rows().map(|(_, _, h, _)| h.len() as u64).sum();
    rep.check(
        r.sweeps <= n && r.relaxations <= n as u64 * heads,
        &format!("{label}complexity"),
        format!("{} sweeps, {} relaxations, n {n}, sum|F| {heads}", r.sweeps, r.relaxations),
    );
    if !r.converged {
        rep.add(Status::Skip, &format!("{label}fixed-point"), format!("no convergence within {n} sweeps (negative cycle suspected)"));
        return;
    }
    rep.check(dp_operator(p, &r.values) == r.values, &format!("{label}fixed-point"), "P(W) = W");
    if n <= args.oracle_max_states {
        let o = value_iteration_oracle(p, 64 * n + 10_000);
        rep.check(o.stabilized && o.values == r.values, &format!("{label}oracle-equivalence"), format!("{} oracle iterations", o.iterations));
    } else {
        rep.add(Status::Skip, &format!("{label}oracle-equivalence"), format!("{n} states exceed --oracle-max-states {}", args.oracle_max_states));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let extra = (0..n * p.n_inputs()).map(|_| (0..2).map(|_| rng.gen_range(0..n as StateId)).collect()).collect();
    let padded = bellman_ford_yen(p, &PaddedPredecessors::new(PredIndex::new(p), extra));
    rep.check(padded.converged && padded.values == r.values, &format!("{label}superset-robustness"), "random extra predecessors");
    let l = policy_performance(p, &r.controller);
    let below = l.0.iter().zip(&r.values.0).filter(|(a, b)| a < b).count();
    let above = l.0.iter().zip(&r.values.0).filter(|(a, b)| a > b).count();
    rep.check(
        below == 0,
        &format!("{label}realization"),
        format!("closed-loop performance equals W on {} of {n} states ({above} above W)", n - above),
    );
}

fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let n = rng.gen_range(1..=32);
    let m = rng.gen_range(1..=4);
    let mut b = ProblemBuilder::new(n, m);
    let cost = |rng: &mut ChaCha8Rng, lo: i32, hi: i32| if rng.gen_bool(0.1) { f64::INFINITY } else { rng.gen_range(lo..=hi) as f64 };
    for x in 0..n {
        for u in 0..m {
            let k = rng.gen_range(1..=3.min(n));
            for y in rand::seq::index::sample(rng, n, k).iter() {
                let c = cost(rng, -3, 5);
                b.arc(x, u, &[y], c).expect("valid arc");
            }
        }
        let g = cost(rng, 0, 10);
        b.terminal(x, g).expect("valid terminal");
    }
    b.build().expect("non-empty images")
}

/// Oracle equivalence on a seeded batch of random instances.
pub fn verify_random(count: usize, args: &VerifyArgs, rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (mut converged, mut bad) = (0, 0);
    for _ in 0..count {
        let p = random_problem(&mut rng);
        let r = bellman_ford_yen(&p, &PredIndex::new(&p));
        if r.converged {
            converged += 1;
            if { let o = value_iteration_oracle(&p, 100_000); !o.stabilized || o.values != r.values } {
                bad += 1;
            }
        }
    }
    rep.check(bad == 0, "random-oracle-equivalence", format!("seed {}, {converged}/{count} converged, {bad} mismatches", args.seed));
}

fn abstraction_checks<F: VectorField<f64>, C: CostModel<f64>>(
    abs: &Abstraction<f64, F, C>,
    args: &VerifyArgs,
    rep: &mut Report,
    label: &str,
) {
    let cover = abs.cover();
    let m = abs.inputs().len();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut bad = 0;
    for _ in 0..args.samples {
        let cell = rng.gen_range(0..cover.n_cells() as StateId);
        let u = rng.gen_range(0..m as InputId);
        let r = cover.cell_rect(cell);
        let x: Vec<f64> = (0..cover.dim()).map(|d| rng.gen_range(r.lo[d]..r.hi[d])).collect();
        let img = abs.image(cell, u);
        let inside = match abs.system().integrate(&x, abs.inputs().get(u), false).map(|y| cover.quantize(&y)) {
            Ok(Ok(c)) if c != cover.overflow() => {
                let mut hit = false;
                cover.for_each_cell(&img, |z| hit |= z == c);
                hit
            }
            _ => img.overflow,
        };
        bad += usize::from(!inside);
    }
    rep.check(bad == 0, &format!("{label}enclosure-containment"), format!("{} sampled triples, {bad} outside F'", args.samples));

    let exhaustive = cover.n_cells() * m <= 200_000;
    let pairs: Vec<(StateId, InputId)> = if exhaustive {
        (0..cover.n_cells() as StateId).flat_map(|z| (0..m as InputId).map(move |u| (z, u))).collect()
    } else {
        (0..args.samples).map(|_| (rng.gen_range(0..cover.n_cells() as StateId), rng.gen_range(0..m as InputId))).collect()
    };
    let mut missing = 0;
    for &(z, u) in &pairs {
        for (y, _) in abs.transitions(z, u) {
            if abs.pred_superset(y, u).binary_search(&z).is_err() {
                missing += 1;
            }
        }
    }
    rep.check(
        missing == 0,
        &format!("{label}predecessor-superset"),
        format!("{} pairs ({}), {missing} missing predecessors", pairs.len(), if exhaustive { "exhaustive" } else { "sampled" }),
    );

    if cover.n_states() <= args.oracle_max_states {
        match abs.build() {
            Ok(p) => verify_problem(&p, args, rep, label),
            Err(e) => rep.check(false, &format!("{label}materialize"), e.to_string()),
        }
    } else {
        rep.add(
            Status::Skip,
            &format!("{label}oracle-equivalence"),
            format!("{} states exceed --oracle-max-states {}", cover.n_states(), args.oracle_max_states),
        );
    }
}

pub fn verify_input(input: &Input, args: &VerifyArgs, rep: &mut Report) -> anyhow::Result<()> {
    match input {
        Input::Problem(p) => {
            rep.check(true, "strictness", format!("every F(x,u) of {} states non-empty", p.n_states()));
            verify_problem(p, args, rep, "");
        }
        Input::Linear(l) => abstraction_checks(&l.abstraction()?, args, rep, ""),
        Input::Mission(m) => {
            let cover = m.plan.cover(&m.regions)?;
            for (tank, label) in [(Tank::Empty, "land/"), (Tank::Full, "drop/")] {
                let abs = abstraction(&m.plan, &cover, tank, build_pi1(&m.regions, &m.plan, &cover)?)?;
                abstraction_checks(&abs, args, rep, label);
            }
        }
    }
    Ok(())
}
