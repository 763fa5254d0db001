use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use symopt::abstraction::GridCover;
use symopt::runtime::SolveOptions;

#[derive(Debug, Serialize)]
pub struct GridInfo {
    pub hash: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<u32>,
    pub periodic: Vec<bool>,
    pub n_states: usize,
}

impl GridInfo {
    pub fn new(cover: &GridCover<f64>, hash: String) -> Self {
        Self {
            hash,
            lower: cover.lower().to_vec(),
            upper: cover.upper().to_vec(),
            cells: cover.cells_per_dim().to_vec(),
            periodic: cover.periodic().to_vec(),
            n_states: cover.n_states(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OptionsInfo {
    pub threads: usize,
    pub cache: String,
    pub mem_budget: usize,
}

impl From<&SolveOptions> for OptionsInfo {
    fn from(o: &SolveOptions) -> Self {
        Self { threads: o.workers, cache: o.cache_policy.to_string(), mem_budget: o.memory_budget_bytes }
    }
}

/// One solved problem and the files written for it.
#[derive(Debug, Serialize)]
pub struct ProblemRecord {
    pub name: String,
    pub n_states: usize,
    pub n_inputs: usize,
    pub converged: bool,
    pub sweeps: usize,
    pub relaxations: u64,
    pub wall_ms: f64,
    pub peak_cache_bytes: usize,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: PathBuf,
    pub config_sha256: String,
    pub kind: String,
    pub grid: Option<GridInfo>,
    pub options: Option<OptionsInfo>,
    pub problems: Vec<ProblemRecord>,
    pub outputs: Vec<PathBuf>,
    pub wall_ms: f64,
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}
