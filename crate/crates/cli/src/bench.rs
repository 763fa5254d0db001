use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use symopt::hypergraph::PredIndex;
use symopt::runtime::{solve_parallel, ParallelReport, ProblemSource, SolveOptions};
use symopt::scenarios::solve_pi1;

use crate::input::{Input, Loaded};

fn solve_once(loaded: &Loaded, opts: &SolveOptions) -> Result<ParallelReport<f64>> {
    Ok(match &loaded.input {
        Input::Problem(p) => {
            let preds = PredIndex::new(p);
            solve_parallel(&ProblemSource::new(p, &preds), opts)?
        }
        Input::Linear(l) => solve_parallel(&l.abstraction()?, opts)?,
        Input::Mission(m) => solve_pi1(&m.regions, &m.plan, &m.plan.cover(&m.regions)?, opts)?,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        (v[k - 1] + v[k]) / 2.0
    }
}

/// Median runtime per thread count on stdout; per-sweep throughput of the
/// last repetition per thread count to `series`.
pub fn cmd_bench(loaded: &Loaded, base: &SolveOptions, threads: &[usize], repeat: usize, series: Option<&Path>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "threads,cache,repeat,median_ms,min_ms,sweeps,relaxations,converged")?;
    let mut rows = Vec::new();
    for &t in threads {
        let opts = SolveOptions { workers: t, ..base.clone() };
        let mut times = Vec::with_capacity(repeat);
        let mut last = None;
        for _ in 0..repeat {
            let started = Instant::now();
            let r = solve_once(loaded, &opts)?;
            times.push(started.elapsed().as_secs_f64() * 1e3);
            last = Some(r);
        }
        let r = last.expect("repeat is at least 1");
        let min = times.iter().copied().fold(f64::INFINITY, f64::min);
        writeln!(
            out,
            "{t},{},{repeat},{:.3},{min:.3},{},{},{}",
            opts.cache_policy,
            median(times),
            r.report.sweeps,
            r.report.relaxations,
            r.report.converged
        )?;
        out.flush()?;
        rows.extend(r.metrics.iter().map(|m| format!("{t},{},{},{:.3},{:.3}", m.sweep, m.frontier, m.wall_ms, m.per_msec)));
    }
    if let Some(p) = series {
        let mut text = String::from("threads,sweep,frontier,wall_ms,per_msec\n");
        for r in rows {
            text.push_str(&r);
            text.push('\n');
        }
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
