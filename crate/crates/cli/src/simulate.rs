use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use symopt::hypergraph::SolveReport;
use symopt::io::{read_binary, write_plot_data, write_trajectory_csv, Artifact};
use symopt::scenarios::{simulate_mission, MissionControllers};

use crate::input::{Input, Loaded};

pub struct SimulateArgs<'a> {
    pub drop: &'a Path,
    pub land: &'a Path,
    pub x0: Option<[f64; 4]>,
    pub out: &'a Path,
    pub plot: Option<&'a PathBuf>,
}

fn load_artifact(path: &Path, grid: &str) -> Result<SolveReport<f64>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let a: Artifact = read_binary(std::io::BufReader::new(f)).with_context(|| format!("{}", path.display()))?;
    a.check_grid(grid).with_context(|| format!("{}", path.display()))?;
    Ok(SolveReport { converged: true, sweeps: 0, relaxations: 0, values: a.values, controller: a.controller })
}

pub fn parse_x0(s: &str) -> Result<[f64; 4]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number `{}` in --x0", t.trim())))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [a, b, c, d] => Ok([*a, *b, *c, *d]),
        _ => bail!("--x0 needs four comma-separated numbers, got {}", v.len()),
    }
}

pub fn cmd_simulate(loaded: &Loaded, args: &SimulateArgs) -> Result<()> {
    let Input::Mission(m) = &loaded.input else { bail!("simulate needs a `kind = mission` configuration") };
    let grid = loaded.input.grid()?;
    let drop = load_artifact(args.drop, &grid)?;
    let land = load_artifact(args.land, &grid)?;
    let x0 = args.x0.unwrap_or(m.plan.p1);
    let traj = simulate_mission(MissionControllers { drop: &drop, land: &land }, &m.regions, &m.plan, x0, m.reward)?;
    let f = std::fs::File::create(args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_trajectory_csv(&traj, BufWriter::new(f))?;
    if let Some(p) = args.plot {
        let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_plot_data(&m.regions, &traj, BufWriter::new(f))?;
    }
    let cover = m.plan.cover(&m.regions)?;
    println!("samples: {}", traj.rows.len());
    println!("cumulative J: {}", traj.total_cost());
    println!("hand-over samples: {:?}", traj.handovers());
    println!("dwell in fire zone: {}", traj.dwell(&m.regions, &cover));
    Ok(())
}
