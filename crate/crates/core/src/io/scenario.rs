//! Interpretation of configuration files as abstraction or mission setups.
//!
//! `kind = linear` describes `x' = A x + B u` on a grid:
//!
//! ```text
//! kind = linear
//! lower = 0, 0          upper = 1, 1        cells = 10, 10
//! periodic = false, false                   # optional
//! tau = 0.1             substeps = 5        # substeps optional
//! a.0 = 0, 1            a.1 = 0, 0          # rows of A
//! b.0 = 0               b.1 = 1             # rows of B
//! growth.0 = ...                            # optional rows replacing A
//! input.0 = -1, 0, 1                        # levels per input component
//! stage = 0.1                               # one cost, or one per input
//! region.target = ...   region.avoid = ...  region.safe = ...
//! region.reward = ...   reward = -1         # optional pair
//! ```
//!
//! `kind = mission` describes the firefighting scenario; every key is
//! optional and defaults to the desk-scale setup (see `examples/`).

use crate::abstraction::{Abstraction, GridCover, InputGrid, LinearField, Region, RegionCostModel, RegionCosts, SampledSystem};
use crate::scenarios::{MissionPlan, ScenarioRegions};

use super::config::{key_error, Config};
use super::FormatError;

/// Linear system on a grid with region costs.
#[derive(Debug, Clone)]
pub struct LinearSpec {
    pub cover: GridCover<f64>,
    pub system: SampledSystem<f64, LinearField<f64>>,
    pub inputs: InputGrid<f64>,
    pub costs: RegionCosts<f64>,
}

impl LinearSpec {
    pub fn abstraction(&self) -> Result<Abstraction<f64, LinearField<f64>, RegionCostModel<f64>>, FormatError> {
        let cost = RegionCostModel::new(&self.cover, &self.costs);
        Ok(Abstraction::new(self.system.clone(), self.cover.clone(), self.inputs.clone(), cost)?)
    }
}

/// Firefighting mission setup.
#[derive(Debug, Clone)]
pub struct MissionSpec {
    pub regions: ScenarioRegions,
    pub plan: MissionPlan,
    /// Reward over the fire in the drop problem.
    pub reward: bool,
}

#[derive(Debug, Clone)]
pub enum ConfigKind {
    Linear(Box<LinearSpec>),
    Mission(Box<MissionSpec>),
}

impl ConfigKind {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let c = Config::parse(text)?;
        match c.get("kind") {
            Some("linear") => Ok(Self::Linear(Box::new(parse_linear(&c)?))),
            Some("mission") => Ok(Self::Mission(Box::new(parse_mission(&c)?))),
            Some(_) => Err(key_error(c.entry("kind").unwrap(), "expected `linear` or `mission`")),
            None => Err(FormatError::Missing("kind".into())),
        }
    }

    pub fn cover(&self) -> Result<GridCover<f64>, FormatError> {
        match self {
            Self::Linear(l) => Ok(l.cover.clone()),
            Self::Mission(m) => Ok(m.plan.cover(&m.regions)?),
        }
    }
}

fn rows(c: &Config, prefix: &str, n: usize, width: usize) -> Result<Option<Vec<f64>>, FormatError> {
    if c.with_prefix(prefix).next().is_none() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(n * width);
    for i in 0..n {
        let key = format!("{prefix}{i}");
        let row = c.list(&key)?;
        if row.len() != width {
            return Err(key_error(c.entry(&key).unwrap(), format!("expected {width} entries")));
        }
        out.extend(row);
    }
    if let Some((_, e)) = c.with_prefix(prefix).find(|(k, _)| k.parse::<usize>().map_or(true, |i| i >= n)) {
        return Err(key_error(e, format!("row index out of range 0..{n}")));
    }
    Ok(Some(out))
}

fn region(c: &Config, key: &str, dim: usize) -> Result<Option<Region<f64>>, FormatError> {
    if c.get(key).is_none() {
        return Ok(None);
    }
    Ok(Some(Region { boxes: c.boxes(key, dim)? }))
}

pub fn parse_linear(c: &Config) -> Result<LinearSpec, FormatError> {
    c.reject_unknown(&[
        "kind", "lower", "upper", "cells", "periodic", "tau", "substeps", "a.", "b.", "growth.", "input.", "stage",
        "region.", "reward",
    ])?;
    let lower = c.list("lower")?;
    let upper = c.list("upper")?;
    let n = lower.len();
    let cells_e = c.entry("cells").ok_or_else(|| FormatError::Missing("cells".into()))?;
    let cells = c
        .list("cells")?
        .into_iter()
        .map(|v| if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 { Ok(v as u32) } else { Err(key_error(cells_e, "cell counts must be positive integers")) })
        .collect::<Result<Vec<_>, _>>()?;
    let periodic = if c.get("periodic").is_some() { c.bools("periodic")? } else { vec![false; n] };
    let cover = GridCover::new(lower, upper, cells, periodic)?;

    let mut levels = Vec::new();
    while let Some(e) = c.entry(&format!("input.{}", levels.len())) {
        levels.push(c.list(&e.key)?);
    }
    if levels.is_empty() {
        return Err(FormatError::Missing("input.0".into()));
    }
    if let Some((_, e)) = c.with_prefix("input.").find(|(k, _)| k.parse::<usize>().map_or(true, |i| i >= levels.len())) {
        return Err(key_error(e, "input components must be numbered 0, 1, ... without gaps"));
    }
    let k = levels.len();
    let inputs = InputGrid::product(&levels)?;

    let a = rows(c, "a.", n, n)?.ok_or_else(|| FormatError::Missing("a.0".into()))?;
    let b = rows(c, "b.", n, k)?.unwrap_or_else(|| vec![0.0; n * k]);
    let mut field = LinearField::new(n, k, a, b)?;
    if let Some(g) = rows(c, "growth.", n, n)? {
        field = field.with_growth(g)?;
    }
    let tau = c.f64("tau")?;
    let system = SampledSystem::new(field, tau, c.usize_or("substeps", crate::abstraction::DEFAULT_SUBSTEPS)?)?;

    let stage = match c.entry("stage") {
        None => vec![tau; inputs.len()],
        Some(e) => {
            let v = c.list("stage")?;
            match v.len() {
                1 => vec![v[0]; inputs.len()],
                l if l == inputs.len() => v,
                _ => return Err(key_error(e, format!("expected 1 or {} costs", inputs.len()))),
            }
        }
    };
    if let Some(e) = c.entry("stage").filter(|_| stage.iter().any(|g| g.is_nan() || *g == f64::NEG_INFINITY)) {
        return Err(key_error(e, "costs must not be -inf"));
    }
    let reward = match (region(c, "region.reward", n)?, c.entry("reward")) {
        (Some(r), Some(_)) => Some((r, c.f64("reward")?)),
        (None, None) => None,
        (Some(_), None) => return Err(FormatError::Missing("reward".into())),
        (None, Some(e)) => return Err(key_error(e, "needs `region.reward`")),
    };
    let costs = RegionCosts {
        safe: region(c, "region.safe", n)?,
        avoid: region(c, "region.avoid", n)?.unwrap_or_else(Region::empty),
        target: region(c, "region.target", n)?.ok_or_else(|| FormatError::Missing("region.target".into()))?,
        reward,
        stage,
    };
    for (name, e) in c.with_prefix("region.") {
        if !["safe", "avoid", "target", "reward"].contains(&name) {
            return Err(key_error(e, "unknown region"));
        }
    }
    Ok(LinearSpec { cover, system, inputs, costs })
}

/// Planar boxes (`x1lo,x1hi,x2lo,x2hi`) or full state boxes (8 numbers).
fn state_region(c: &Config, key: &str) -> Result<Option<Region<f64>>, FormatError> {
    let Some(e) = c.entry(key) else { return Ok(None) };
    let first = e.value.split(';').find(|p| !p.trim().is_empty()).unwrap_or("");
    let dim = if first.split(',').count() == 4 { 2 } else { 4 };
    let boxes = c
        .boxes(key, dim)?
        .into_iter()
        .map(|(mut lo, mut hi)| {
            lo.resize(4, f64::NEG_INFINITY);
            hi.resize(4, f64::INFINITY);
            (lo, hi)
        })
        .collect();
    Ok(Some(Region { boxes }))
}

fn pair(c: &Config, key: &str, default: (f64, f64)) -> Result<(f64, f64), FormatError> {
    match c.entry(key) {
        None => Ok(default),
        Some(e) => match c.list(key)?.as_slice() {
            [a, b] if a < b => Ok((*a, *b)),
            _ => Err(key_error(e, "expected `low, high` with low < high")),
        },
    }
}

pub fn parse_mission(c: &Config) -> Result<MissionSpec, FormatError> {
    c.reject_unknown(&[
        "kind", "cells", "tau", "substeps", "reward_rate", "reward", "speed_band", "speed_margin", "thrust", "bank",
        "p1", "max_steps", "handover_at_fire", "mass_empty", "mass_full", "drag", "lift", "scen", "speed", "region.",
    ])?;
    let mut plan = MissionPlan::desk_scale();
    let mut regions = ScenarioRegions::default();
    if let Some(e) = c.entry("cells") {
        let v = c.list("cells")?;
        if v.len() != 4 || v.iter().any(|x| *x < 1.0 || x.fract() != 0.0) {
            return Err(key_error(e, "expected 4 positive integers"));
        }
        plan.cells = [v[0] as u32, v[1] as u32, v[2] as u32, v[3] as u32];
    }
    plan.tau = c.f64_or("tau", plan.tau)?;
    plan.substeps = c.usize_or("substeps", plan.substeps)?;
    plan.reward_rate = c.f64_or("reward_rate", plan.reward_rate)?;
    plan.speed_band = pair(c, "speed_band", plan.speed_band)?;
    plan.speed_margin = c.f64_or("speed_margin", plan.speed_margin)?;
    plan.thrust_levels = c.list_or("thrust", plan.thrust_levels)?;
    plan.bank_levels = c.list_or("bank", plan.bank_levels)?;
    plan.max_steps = c.usize_or("max_steps", plan.max_steps)?;
    plan.handover_at_fire = c.bool_or("handover_at_fire", plan.handover_at_fire)?;
    if let Some(e) = c.entry("p1") {
        match c.list("p1")?.as_slice() {
            [a, b, h, v] => plan.p1 = [*a, *b, *h, *v],
            _ => return Err(key_error(e, "expected 4 numbers")),
        }
    }
    plan.params.m1 = c.f64_or("mass_empty", plan.params.m1)?;
    plan.params.m2 = c.f64_or("mass_full", plan.params.m2)?;
    plan.params.drag = c.f64_or("drag", plan.params.drag)?;
    plan.params.lift = c.f64_or("lift", plan.params.lift)?;
    for (key, v) in [("tau", plan.tau), ("mass_empty", plan.params.m1), ("mass_full", plan.params.m2)] {
        if let Some(e) = c.entry(key).filter(|_| !(v > 0.0 && v.is_finite())) {
            return Err(key_error(e, "must be positive"));
        }
    }
    if let Some(e) = c.entry("scen") {
        match c.list("scen")?.as_slice() {
            [a, b, d, f] if a < b && d < f => regions.scen = ([*a, *d], [*b, *f]),
            _ => return Err(key_error(e, "expected `x1lo, x1hi, x2lo, x2hi`")),
        }
    }
    regions.speed = pair(c, "speed", regions.speed)?;
    for (name, e) in c.with_prefix("region.") {
        let r = state_region(c, &e.key)?.unwrap();
        match name {
            "runway" => regions.runway = r,
            "landing" => regions.landing = r,
            "fire" => regions.fire = r,
            "drop" => regions.drop = r,
            "nofly" => regions.nofly = r,
            "hills" => regions.hills = r,
            _ => return Err(key_error(e, "unknown region")),
        }
    }
    let reward = c.bool_or("reward", true)?;
    plan.cover(&regions)?;
    plan.inputs()?;
    Ok(MissionSpec { regions, plan, reward })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DI: &str = "kind = linear\nlower = 0, -1\nupper = 1, 1\ncells = 4, 4\ntau = 0.1\na.0 = 0, 1\na.1 = 0, 0\nb.0 = 0\nb.1 = 1\ninput.0 = -1, 1\nregion.target = 0.75, 1, -1, 1\n";

    #[test]
    fn linear_config_builds_an_abstraction() {
        let ConfigKind::Linear(spec) = ConfigKind::parse(DI).unwrap() else { panic!("kind") };
        assert_eq!(spec.cover.n_cells(), 16);
        assert_eq!(spec.inputs.len(), 2);
        assert_eq!(spec.costs.stage, vec![0.1, 0.1]);
        let abs = spec.abstraction().unwrap();
        assert_eq!(abs.cover().n_states(), 17);
    }

    #[test]
    fn linear_config_errors_name_keys() {
        let bad = DI.replace("a.1 = 0, 0", "a.1 = 0");
        let e = ConfigKind::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("`a.1`") && e.contains("line 7"), "{e}");
        let e = ConfigKind::parse(&format!("{DI}colour = red\n")).unwrap_err().to_string();
        assert!(e.contains("unknown key"), "{e}");
    }

    #[test]
    fn mission_defaults_and_overrides() {
        let ConfigKind::Mission(m) = ConfigKind::parse("kind = mission\n").unwrap() else { panic!("kind") };
        assert_eq!(m.plan, MissionPlan::desk_scale());
        assert_eq!(m.regions, ScenarioRegions::default());
        let text = "kind = mission\ncells = 20, 10, 8, 1\nregion.fire = 1000, 1200, 300, 500\nregion.landing = *,*,*,*,-10deg,10deg,50,55\nreward = false\n";
        let ConfigKind::Mission(m) = ConfigKind::parse(text).unwrap() else { panic!("kind") };
        assert_eq!(m.plan.cells, [20, 10, 8, 1]);
        assert!(!m.reward);
        assert_eq!(m.regions.fire.boxes[0].0, vec![1000.0, 300.0, f64::NEG_INFINITY, f64::NEG_INFINITY]);
        assert_eq!(m.regions.landing, ScenarioRegions::default().landing);
    }
}
