use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Context, Result};
use symopt::io::{read_binary, read_controller_text, read_values_text, write_binary, write_controller_text, write_values_text, Artifact};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<std::fs::File>> {
    Ok(BufWriter::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// Text pair to binary.
pub fn to_binary(values: &Path, controller: &Path, bin: &Path) -> Result<()> {
    let (grid, v) = read_values_text(&read(values)?).with_context(|| format!("{}", values.display()))?;
    let (grid2, mu) = read_controller_text(&read(controller)?).with_context(|| format!("{}", controller.display()))?;
    if grid != grid2 {
        bail!("value file has grid {grid} but controller file has grid {grid2}");
    }
    if v.len() != mu.len() {
        bail!("value file has {} states but controller file has {}", v.len(), mu.len());
    }
    let mut out = create(bin)?;
    write_binary(&Artifact { grid, values: v, controller: mu }, &mut out)?;
    std::io::Write::flush(&mut out)?;
    Ok(())
}

/// Binary to text pair.
pub fn to_text(bin: &Path, values: &Path, controller: &Path) -> Result<()> {
    let f = std::fs::File::open(bin).with_context(|| format!("opening {}", bin.display()))?;
    let a = read_binary(std::io::BufReader::new(f)).with_context(|| format!("{}", bin.display()))?;
    write_values_text(&a.grid, &a.values, create(values)?)?;
    write_controller_text(&a.grid, &a.controller, create(controller)?)?;
    Ok(())
}
