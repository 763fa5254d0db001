use rayon::prelude::*;

use crate::hypergraph::{DiscreteProblem, InputId, ProblemBuilder, StateId};
use crate::runtime::TransitionSource;
use crate::scalar::Scalar;

use super::enclosure::EnclosureModel;
use super::field::{SampledSystem, VectorField};
use super::grid::{GridCover, IndexBox, Rect};
use super::region::Region;
use super::{AbstractionError, InputGrid, MAX_DIM};

/// Abstract costs on a grid: `G'` per cell and `g'` per transition into a
/// grid cell. Transitions into the overflow cell always cost `+inf` and the
/// overflow cell has `G' = +inf`; models are never asked about it.
pub trait CostModel<T>: Sync {
    fn terminal(&self, cell: StateId) -> T;
    fn stage(&self, from: StateId, to: StateId, input: InputId) -> T;
}

pub const UNSAFE: u8 = 1;
pub const REWARD: u8 = 2;
pub const TARGET: u8 = 4;

/// Region description of a reach-avoid cost.
#[derive(Debug, Clone)]
pub struct RegionCosts<T> {
    /// Cells not inside this set are unsafe (`None`: whole grid is safe).
    pub safe: Option<Region<T>>,
    /// Cells meeting this set are unsafe.
    pub avoid: Region<T>,
    /// `G' = 0` on cells inside this set, `+inf` elsewhere.
    pub target: Region<T>,
    /// Stage cost for entering a cell inside the region.
    pub reward: Option<(Region<T>, T)>,
    /// Stage cost per input on all other safe transitions.
    pub stage: Vec<T>,
}

/// [`CostModel`] built from per-cell region flags.
///
/// Unsafe cells are those meeting the avoid set or not inside the safe set;
/// reward and target flags need the whole cell inside the region. These are
/// the conservative directions: a concrete cost never exceeds the abstract
/// one.
#[derive(Debug, Clone)]
pub struct RegionCostModel<T> {
    flags: Vec<u8>,
    stage: Vec<T>,
    reward: Option<T>,
    terminal: Option<Vec<T>>,
}

impl<T: Scalar> RegionCostModel<T> {
    pub fn new(cover: &GridCover<T>, costs: &RegionCosts<T>) -> Self {
        let flags = (0..cover.n_cells() as StateId)
            .into_par_iter()
            .map(|c| {
                let r = cover.cell_rect(c);
                let mut f = 0u8;
                if costs.avoid.intersects(cover, &r) || costs.safe.as_ref().is_some_and(|s| !s.contains_rect(cover, &r)) {
                    f |= UNSAFE;
                }
                if costs.reward.as_ref().is_some_and(|(reg, _)| reg.contains_rect(cover, &r)) {
                    f |= REWARD;
                }
                if costs.target.contains_rect(cover, &r) {
                    f |= TARGET;
                }
                f
            })
            .collect();
        Self { flags, stage: costs.stage.clone(), reward: costs.reward.as_ref().map(|r| r.1), terminal: None }
    }

    /// Replaces the target-based terminal cost by explicit values (one per
    /// grid cell, or per state including the overflow cell).
    pub fn with_terminal_values(mut self, values: Vec<T>) -> Result<Self, AbstractionError> {
        let n = self.flags.len();
        if values.len() != n && values.len() != n + 1 {
            return Err(AbstractionError::GridMismatch { expected: n + 1, found: values.len() });
        }
        self.terminal = Some(values);
        Ok(self)
    }

    pub fn flags(&self, cell: StateId) -> u8 {
        self.flags[cell as usize]
    }

    pub fn n_cells(&self) -> usize {
        self.flags.len()
    }
}

impl<T: Scalar> CostModel<T> for RegionCostModel<T> {
    fn terminal(&self, cell: StateId) -> T {
        match &self.terminal {
            Some(v) => v[cell as usize],
            None if self.flags[cell as usize] & TARGET != 0 => T::zero(),
            None => T::infinity(),
        }
    }

    fn stage(&self, _from: StateId, to: StateId, input: InputId) -> T {
        let f = self.flags[to as usize];
        if f & UNSAFE != 0 {
            T::infinity()
        } else if let (true, Some(r)) = (f & REWARD != 0, self.reward) {
            r
        } else {
            self.stage[input as usize]
        }
    }
}

/// Predecessor superset of one state: a box of cells per input, or every
/// state for the overflow cell.
#[derive(Debug, Clone)]
pub struct PredBoxes {
    pub boxes: Vec<IndexBox>,
    pub all: bool,
}

/// Discrete abstraction of a sampled system on a grid, with transitions
/// computed on demand.
pub struct Abstraction<T, F, C> {
    sys: SampledSystem<T, F>,
    cover: GridCover<T>,
    inputs: InputGrid<T>,
    cost: C,
    enclosure: EnclosureModel<T>,
}

impl<T: Scalar, F: VectorField<T>, C: CostModel<T>> Abstraction<T, F, C> {
    pub fn new(sys: SampledSystem<T, F>, cover: GridCover<T>, inputs: InputGrid<T>, cost: C) -> Result<Self, AbstractionError> {
        if inputs.dim() != sys.field.input_dim() {
            return Err(AbstractionError::InvalidConfig(format!(
                "inputs have dimension {}, field expects {}",
                inputs.dim(),
                sys.field.input_dim()
            )));
        }
        let enclosure = EnclosureModel::new(&sys, &cover, &inputs)?;
        Ok(Self { sys, cover, inputs, cost, enclosure })
    }

    pub fn system(&self) -> &SampledSystem<T, F> {
        &self.sys
    }

    pub fn cover(&self) -> &GridCover<T> {
        &self.cover
    }

    pub fn inputs(&self) -> &InputGrid<T> {
        &self.inputs
    }

    pub fn cost(&self) -> &C {
        &self.cost
    }

    pub fn enclosure(&self) -> &EnclosureModel<T> {
        &self.enclosure
    }

    fn boxed(&self, center: &[T], radius: &[T; MAX_DIM]) -> Rect<T> {
        let n = self.cover.dim();
        let mut r = Rect { dim: n, lo: [T::zero(); MAX_DIM], hi: [T::zero(); MAX_DIM] };
        for d in 0..n {
            r.lo[d] = center[d] - radius[d];
            r.hi[d] = center[d] + radius[d];
        }
        r
    }

    fn flow_center(&self, cell: StateId, u: InputId, reverse: bool) -> Result<[T; MAX_DIM], AbstractionError> {
        let n = self.cover.dim();
        let mut c = [T::zero(); MAX_DIM];
        self.cover.cell_center(cell, &mut c[..n]);
        let mut out = [T::zero(); MAX_DIM];
        self.sys.integrate_into(&c[..n], self.inputs.get(u), reverse, &mut out)?;
        Ok(out)
    }

    /// Box enclosing `phi(+-tau, cell, u)`.
    pub fn attainable_box(&self, cell: StateId, u: InputId, reverse: bool) -> Result<Rect<T>, AbstractionError> {
        assert!((cell as usize) < self.cover.n_cells(), "attainable_box needs a bounded cell");
        let c = self.flow_center(cell, u, reverse)?;
        Ok(self.boxed(&c[..self.cover.dim()], self.enclosure.radius(u as usize, reverse)))
    }

    /// Cells of `F'(cell, u)`; integration failures count as leaving the
    /// operating range.
    pub fn image(&self, cell: StateId, u: InputId) -> IndexBox {
        let none = IndexBox { start: [0; MAX_DIM], count: [0; MAX_DIM], dim: self.cover.dim() as u8, overflow: true };
        if cell == self.cover.overflow() {
            return none;
        }
        match self.attainable_box(cell, u, false) {
            Ok(r) => self.cover.index_box(&r),
            Err(_) => none,
        }
    }

    fn pred_box(&self, cell: StateId, u: InputId) -> Option<IndexBox> {
        let c = self.flow_center(cell, u, true).ok()?;
        let r = self.boxed(&c[..self.cover.dim()], self.enclosure.pred_radius(u as usize));
        Some(self.cover.index_box(&r))
    }

    fn pred_boxes(&self, cell: StateId) -> PredBoxes {
        if cell == self.cover.overflow() {
            return PredBoxes { boxes: Vec::new(), all: true };
        }
        let mut boxes = Vec::with_capacity(self.inputs.len());
        for u in 0..self.inputs.len() as InputId {
            match self.pred_box(cell, u) {
                Some(b) if b.n_cells() > 0 => {
                    if !boxes.iter().any(|o: &IndexBox| o.start == b.start && o.count == b.count) {
                        boxes.push(b);
                    }
                }
                Some(_) => {}
                None => return PredBoxes { boxes: Vec::new(), all: true },
            }
        }
        PredBoxes { boxes, all: false }
    }

    /// A superset of `{ z | cell in F'(z, u) }`, sorted.
    pub fn pred_superset(&self, cell: StateId, u: InputId) -> Vec<StateId> {
        let mut out = Vec::new();
        if cell == self.cover.overflow() {
            out.extend(0..self.cover.n_states() as StateId);
            return out;
        }
        match self.pred_box(cell, u) {
            Some(b) => self.cover.for_each_cell(&b, |z| out.push(z)),
            None => out.extend(0..self.cover.n_cells() as StateId),
        }
        out.sort_unstable();
        out
    }

    /// Heads of `F'(cell, u)` with their running costs.
    pub fn transitions(&self, cell: StateId, u: InputId) -> Vec<(StateId, T)> {
        let img = self.image(cell, u);
        let mut out = Vec::with_capacity(img.n_cells() + 1);
        self.cover.for_each_cell(&img, |y| out.push((y, self.cost.stage(cell, y, u))));
        if img.overflow {
            out.push((self.cover.overflow(), T::infinity()));
        }
        out
    }

    /// Materializes the abstraction as an explicit problem.
    pub fn build(&self) -> Result<DiscreteProblem<T>, AbstractionError> {
        let m = self.inputs.len();
        let rows: Vec<Vec<Vec<(StateId, T)>>> = (0..self.cover.n_states() as StateId)
            .into_par_iter()
            .map(|x| (0..m as InputId).map(|u| self.transitions(x, u)).collect())
            .collect();
        let mut b = ProblemBuilder::new(self.cover.n_states(), m);
        for (x, per_input) in rows.into_iter().enumerate() {
            for (u, heads) in per_input.into_iter().enumerate() {
                for (y, c) in heads {
                    b.arc(x, u, &[y as usize], c)?;
                }
            }
            b.terminal(x, self.terminal(x as StateId))?;
        }
        Ok(b.build()?)
    }

    fn terminal(&self, x: StateId) -> T {
        if x == self.cover.overflow() {
            T::infinity()
        } else {
            self.cost.terminal(x)
        }
    }
}

impl<T: Scalar, F: VectorField<T>, C: CostModel<T>> TransitionSource<T> for Abstraction<T, F, C> {
    type Image = IndexBox;
    type Preds = PredBoxes;

    fn n_states(&self) -> usize {
        self.cover.n_states()
    }

    fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    fn terminal_cost(&self, x: StateId) -> T {
        self.terminal(x)
    }

    fn forward_image(&self, x: StateId, u: InputId) -> IndexBox {
        self.image(x, u)
    }

    fn image_bytes(&self, _image: &IndexBox) -> usize {
        std::mem::size_of::<IndexBox>()
    }

    fn worst_case<W: Fn(StateId) -> T>(&self, x: StateId, u: InputId, image: &IndexBox, w: W, bound: T) -> T {
        if image.overflow {
            return T::infinity();
        }
        let mut worst = T::neg_infinity();
        self.cover.visit_cells(image, |y| {
            let g = self.cost.stage(x, y, u);
            if g == T::infinity() {
                worst = g;
                return false;
            }
            let v = g + w(y);
            if v > worst {
                worst = v;
            }
            worst < bound
        });
        worst
    }

    fn predecessor_set(&self, x: StateId) -> PredBoxes {
        self.pred_boxes(x)
    }

    fn preds_bytes(&self, preds: &PredBoxes) -> usize {
        std::mem::size_of::<PredBoxes>() + preds.boxes.len() * std::mem::size_of::<IndexBox>()
    }

    fn for_each_pred<G: FnMut(StateId)>(&self, preds: &PredBoxes, mut f: G) {
        if preds.all {
            (0..self.cover.n_states() as StateId).for_each(f);
        } else {
            for b in &preds.boxes {
                self.cover.for_each_cell(b, &mut f);
            }
        }
    }
}
