use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use symopt::io::write_problem;
use symopt::scenarios::{abstraction, build_pi1, Tank};

use crate::input::{Input, Loaded};
use crate::manifest::{GridInfo, RunManifest};

/// Writes the abstraction of a configuration (the landing problem for
/// missions) as a flat problem file.
pub fn cmd_build(config: &Path, loaded: &Loaded, dir: &Path) -> Result<()> {
    let started = Instant::now();
    let problem = match &loaded.input {
        Input::Problem(_) => bail!("{} is already a flat problem", config.display()),
        Input::Linear(l) => l.abstraction()?.build()?,
        Input::Mission(m) => {
            let cover = m.plan.cover(&m.regions)?;
            abstraction(&m.plan, &cover, Tank::Empty, build_pi1(&m.regions, &m.plan, &cover)?)?.build()?
        }
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("problem.txt");
    let f = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(f);
    write_problem(&problem, &mut out)?;
    std::io::Write::flush(&mut out)?;
    let grid = loaded.input.grid()?;
    let manifest = RunManifest {
        command: "build".into(),
        config: config.to_path_buf(),
        config_sha256: loaded.sha256.clone(),
        kind: loaded.input.kind().into(),
        grid: loaded.input.cover()?.map(|c| GridInfo::new(&c, grid)),
        options: None,
        problems: Vec::new(),
        outputs: vec![path.clone()],
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    manifest.write(dir)?;
    println!("{}: {} states, {} inputs, {} arcs", path.display(), problem.n_states(), problem.n_inputs(), problem.arc_count());
    Ok(())
}
