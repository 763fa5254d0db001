use std::io::Write;

use crate::abstraction::Region;
use crate::scenarios::{ScenarioRegions, Trajectory};

pub const TRAJECTORY_HEADER: &str = "t,x1,x2,x3,x4,u1,u2,phase,stage_cost,cumulative_J,handover_flag";

/// One CSV row per sample. The final row has no input and empty `u` columns.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for r in &traj.rows {
        let (u1, u2) = match r.u {
            Some([a, b]) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{u1},{u2},{},{},{},{}",
            r.t,
            r.x[0],
            r.x[1],
            r.x[2],
            r.x[3],
            r.phase.label(),
            r.stage_cost,
            r.cumulative,
            u8::from(r.handover)
        )?;
    }
    Ok(())
}

fn outline<W: Write>(out: &mut W, name: &str, region: &Region<f64>, scen: ([f64; 2], [f64; 2])) -> std::io::Result<()> {
    for (lo, hi) in &region.boxes {
        let x0 = lo[0].max(scen.0[0]);
        let x1 = hi[0].min(scen.1[0]);
        let y0 = lo[1].max(scen.0[1]);
        let y1 = hi[1].min(scen.1[1]);
        if x0 > x1 || y0 > y1 {
            continue;
        }
        writeln!(out, "# {name}")?;
        for (x, y) in [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)] {
            writeln!(out, "{x} {y}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Planar region outlines and the flown path as whitespace-separated
/// polylines, blocks separated by blank lines (gnuplot `index` friendly).
pub fn write_plot_data<W: Write>(regions: &ScenarioRegions, traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    let scen = regions.scen;
    let area = Region::from_box(scen.0.to_vec(), scen.1.to_vec());
    outline(&mut out, "area", &area, scen)?;
    for (name, r) in [
        ("runway", &regions.runway),
        ("fire", &regions.fire),
        ("nofly", &regions.nofly),
        ("hills", &regions.hills),
    ] {
        outline(&mut out, name, r, scen)?;
    }
    writeln!(out, "# path")?;
    for r in &traj.rows {
        writeln!(out, "{} {} {}", r.x[0], r.x[1], r.phase.label())?;
    }
    Ok(())
}
