use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use symopt::hypergraph::PredIndex;
use symopt::io::{write_binary, write_controller_text, write_values_text, Artifact};
use symopt::runtime::{solve_parallel, write_metrics_csv, ParallelReport, ProblemSource, SolveOptions, TransitionSource};
use symopt::scenarios::{abstraction, build_pi2, solve_pi1, Tank};

use crate::input::{Input, Loaded};
use crate::manifest::{GridInfo, OptionsInfo, ProblemRecord, RunManifest};

fn create(path: &Path) -> Result<BufWriter<std::fs::File>> {
    Ok(BufWriter::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// Writes values, controller, binary artifact and metrics of one solve.
pub fn write_outputs(dir: &Path, name: &str, grid: &str, r: &ParallelReport<f64>) -> Result<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = ["values.txt", "controller.txt", "bin", "metrics.csv"]
        .iter()
        .map(|ext| dir.join(format!("{name}.{ext}")))
        .collect();
    write_values_text(grid, &r.report.values, create(&paths[0])?)?;
    write_controller_text(grid, &r.report.controller, create(&paths[1])?)?;
    let artifact = Artifact { grid: grid.to_string(), values: r.report.values.clone(), controller: r.report.controller.clone() };
    write_binary(&artifact, create(&paths[2])?)?;
    write_metrics_csv(create(&paths[3])?, &r.metrics)?;
    Ok(paths)
}

fn record<S: TransitionSource<f64>>(
    name: &str,
    source: &S,
    opts: &SolveOptions,
    dir: &Path,
    grid: &str,
) -> Result<(ParallelReport<f64>, ProblemRecord)> {
    let started = Instant::now();
    let r = solve_parallel(source, opts)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let outputs = write_outputs(dir, name, grid, &r)?;
    println!(
        "{name}: converged {} after {} sweeps, {} relaxations, {:.1} s",
        r.report.converged,
        r.report.sweeps,
        r.report.relaxations,
        wall_ms / 1e3
    );
    let rec = ProblemRecord {
        name: name.into(),
        n_states: source.n_states(),
        n_inputs: source.n_inputs(),
        converged: r.report.converged,
        sweeps: r.report.sweeps,
        relaxations: r.report.relaxations,
        wall_ms,
        peak_cache_bytes: r.peak_cache_bytes,
        outputs,
    };
    Ok((r, rec))
}

/// Solves every problem of the input. Returns whether all converged.
pub fn cmd_solve(config: &Path, loaded: &Loaded, opts: &SolveOptions, dir: &Path) -> Result<bool> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let started = Instant::now();
    let grid = loaded.input.grid()?;
    let mut problems = Vec::new();
    match &loaded.input {
        Input::Problem(p) => {
            let preds = PredIndex::new(p);
            problems.push(record("solution", &ProblemSource::new(p, &preds), opts, dir, &grid)?.1);
        }
        Input::Linear(l) => {
            problems.push(record("solution", &l.abstraction()?, opts, dir, &grid)?.1);
        }
        Input::Mission(m) => {
            let cover = m.plan.cover(&m.regions)?;
            let t = Instant::now();
            let pi1 = solve_pi1(&m.regions, &m.plan, &cover, opts)?;
            let wall_ms = t.elapsed().as_secs_f64() * 1e3;
            println!("land: converged {} after {} sweeps, {:.1} s", pi1.report.converged, pi1.report.sweeps, wall_ms / 1e3);
            let outputs = write_outputs(dir, "land", &grid, &pi1)?;
            problems.push(ProblemRecord {
                name: "land".into(),
                n_states: cover.n_states(),
                n_inputs: pi1.report.controller.n_inputs,
                converged: pi1.report.converged,
                sweeps: pi1.report.sweeps,
                relaxations: pi1.report.relaxations,
                wall_ms,
                peak_cache_bytes: pi1.peak_cache_bytes,
                outputs,
            });
            if pi1.report.converged {
                let cost2 = build_pi2(&m.regions, &m.plan, &cover, &pi1.report.values, m.reward)?;
                let abs2 = abstraction(&m.plan, &cover, Tank::Full, cost2)?;
                problems.push(record("drop", &abs2, opts, dir, &grid)?.1);
            } else {
                log::warn!("landing problem did not converge; drop problem skipped");
            }
        }
    }
    let converged = problems.iter().all(|p| p.converged) && !problems.is_empty();
    let manifest = RunManifest {
        command: "solve".into(),
        config: config.to_path_buf(),
        config_sha256: loaded.sha256.clone(),
        kind: loaded.input.kind().into(),
        grid: loaded.input.cover()?.map(|c| GridInfo::new(&c, grid.clone())),
        options: Some(OptionsInfo::from(opts)),
        outputs: problems.iter().flat_map(|p| p.outputs.iter().cloned()).collect(),
        problems,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let path = manifest.write(dir)?;
    println!("manifest: {}", path.display());
    Ok(converged)
}
