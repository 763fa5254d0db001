use std::f64::consts::PI;

use crate::abstraction::Region;

const INF: f64 = f64::INFINITY;

/// Sets of the firefighting scenario over `(x1, x2, heading, speed)`,
/// headings in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRegions {
    /// Planar operating area.
    pub scen: ([f64; 2], [f64; 2]),
    /// Admissible speeds.
    pub speed: (f64, f64),
    pub runway: Region<f64>,
    pub landing: Region<f64>,
    pub fire: Region<f64>,
    pub drop: Region<f64>,
    pub nofly: Region<f64>,
    pub hills: Region<f64>,
}

fn planar(boxes: &[[f64; 4]]) -> Region<f64> {
    Region { boxes: boxes.iter().map(|b| (vec![b[0], b[2], -INF, -INF], vec![b[1], b[3], INF, INF])).collect() }
}

impl Default for ScenarioRegions {
    /// Runway, envelopes and no-fly zone of the scenario. The
    /// fire and hill boxes are approximate placements, not measured data.
    fn default() -> Self {
        let deg = PI / 180.0;
        Self {
            scen: ([0.0, 0.0], [2500.0, 800.0]),
            speed: (50.0, 85.0),
            runway: planar(&[[300.0, 900.0, 100.0, 180.0]]),
            landing: Region::from_box(vec![-INF, -INF, -10.0 * deg, 50.0], vec![INF, INF, 10.0 * deg, 55.0]),
            fire: planar(&[[1100.0, 1260.0, 380.0, 540.0]]),
            drop: Region::from_box(vec![-INF, -INF, -INF, 53.0], vec![INF, INF, INF, 56.0]),
            nofly: Region::from_box(vec![320.0, 120.0, 12.0 * deg, -INF], vec![880.0, 160.0, 348.0 * deg, INF]),
            hills: planar(&[
                [450.0, 650.0, 620.0, 800.0],
                [1500.0, 1700.0, 420.0, 640.0],
                [1750.0, 1950.0, 0.0, 160.0],
            ]),
        }
    }
}

fn intersect(a: &Region<f64>, b: &Region<f64>) -> Region<f64> {
    let mut out = Region::empty();
    for (alo, ahi) in &a.boxes {
        for (blo, bhi) in &b.boxes {
            let lo: Vec<f64> = alo.iter().zip(blo).map(|(x, y)| x.max(*y)).collect();
            let hi: Vec<f64> = ahi.iter().zip(bhi).map(|(x, y)| x.min(*y)).collect();
            if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
                out.boxes.push((lo, hi));
            }
        }
    }
    out
}

impl ScenarioRegions {
    /// The state constraint set: operating area times admissible speeds.
    pub fn safe(&self) -> Region<f64> {
        let (lo, hi) = self.scen;
        Region::from_box(vec![lo[0], lo[1], -INF, self.speed.0], vec![hi[0], hi[1], INF, self.speed.1])
    }

    /// No-fly zone and hills.
    pub fn avoid(&self) -> Region<f64> {
        self.nofly.clone().union(&self.hills)
    }

    /// Runway times landing envelope.
    pub fn target(&self) -> Region<f64> {
        intersect(&self.runway, &self.landing)
    }

    /// Fire area times drop envelope.
    pub fn drop_zone(&self) -> Region<f64> {
        intersect(&self.fire, &self.drop)
    }
}
