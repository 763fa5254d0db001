use crate::hypergraph::StateId;
use crate::scalar::Scalar;

use super::{AbstractionError, MAX_DIM};

/// Relative overlap, in cell widths, below which a box does not count as
/// meeting a cell.
pub const SLIVER: f64 = 1e-9;

/// Axis-aligned box with closed bounds, stored inline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub dim: usize,
    pub lo: [T; MAX_DIM],
    pub hi: [T; MAX_DIM],
}

impl<T: Scalar> Rect<T> {
    pub fn new(lo: &[T], hi: &[T]) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.len() <= MAX_DIM);
        let mut r = Self { dim: lo.len(), lo: [T::zero(); MAX_DIM], hi: [T::zero(); MAX_DIM] };
        r.lo[..lo.len()].copy_from_slice(lo);
        r.hi[..hi.len()].copy_from_slice(hi);
        r
    }

    pub fn lo(&self) -> &[T] {
        &self.lo[..self.dim]
    }

    pub fn hi(&self) -> &[T] {
        &self.hi[..self.dim]
    }

    pub fn contains_point(&self, x: &[T]) -> bool {
        (0..self.dim).all(|d| self.lo[d] <= x[d] && x[d] <= self.hi[d])
    }
}

/// Cells met by a box: per dimension a run of `count` consecutive indices
/// starting at `start` (wrapping in periodic dimensions), plus whether the box
/// leaves the operating range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexBox {
    pub start: [u16; MAX_DIM],
    pub count: [u16; MAX_DIM],
    pub dim: u8,
    pub overflow: bool,
}

impl IndexBox {
    /// Number of grid cells covered (the overflow cell not included).
    pub fn n_cells(&self) -> usize {
        (0..self.dim as usize).map(|d| self.count[d] as usize).product()
    }
}

/// Uniform grid over a hyper-rectangle plus one overflow cell for every point
/// outside of it.
///
/// Cells are half-open `[l, l + eta)` in every dimension; in non-periodic
/// dimensions the last cell also contains the upper bound. Cell ids are
/// row-major over the multi-index, the overflow cell has id `n_cells()`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCover<T> {
    lower: Vec<T>,
    upper: Vec<T>,
    cells: Vec<u32>,
    periodic: Vec<bool>,
    eta: Vec<T>,
    strides: Vec<u64>,
    n_cells: usize,
}

impl<T: Scalar> GridCover<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>, cells: Vec<u32>, periodic: Vec<bool>) -> Result<Self, AbstractionError> {
        let n = lower.len();
        if n == 0 || n > MAX_DIM || upper.len() != n || cells.len() != n || periodic.len() != n {
            return Err(AbstractionError::InvalidConfig("grid bounds, cell counts and periodic flags must share one dimension".into()));
        }
        for d in 0..n {
            if !(lower[d] < upper[d]) || !lower[d].is_finite() || !upper[d].is_finite() {
                return Err(AbstractionError::InvalidConfig(format!("empty or unbounded range in dimension {d}")));
            }
            if cells[d] == 0 || cells[d] > u16::MAX as u32 {
                return Err(AbstractionError::InvalidConfig(format!("cell count {} in dimension {d}", cells[d])));
            }
        }
        let total = cells.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c as u64));
        let n_cells = match total {
            Some(t) if t < u32::MAX as u64 => t as usize,
            _ => return Err(AbstractionError::InvalidConfig("grid has too many cells".into())),
        };
        let eta = (0..n).map(|d| (upper[d] - lower[d]) / T::from_u32(cells[d]).unwrap()).collect();
        let mut strides = vec![1u64; n];
        for d in (0..n - 1).rev() {
            strides[d] = strides[d + 1] * cells[d + 1] as u64;
        }
        Ok(Self { lower, upper, cells, periodic, eta, strides, n_cells })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Cells plus the overflow cell.
    pub fn n_states(&self) -> usize {
        self.n_cells + 1
    }

    pub fn overflow(&self) -> StateId {
        self.n_cells as StateId
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn cells_per_dim(&self) -> &[u32] {
        &self.cells
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn eta(&self) -> &[T] {
        &self.eta
    }

    /// Length of dimension `d` if it is periodic.
    pub fn period(&self, d: usize) -> Option<T> {
        self.periodic[d].then(|| self.upper[d] - self.lower[d])
    }

    pub fn encode(&self, idx: &[u32]) -> StateId {
        debug_assert!(idx.iter().zip(&self.cells).all(|(i, c)| i < c));
        idx.iter().zip(&self.strides).map(|(&i, &s)| i as u64 * s).sum::<u64>() as StateId
    }

    pub fn decode(&self, id: StateId, idx: &mut [u32]) {
        debug_assert!((id as usize) < self.n_cells);
        let mut rest = id as u64;
        for d in 0..self.dim() {
            idx[d] = (rest / self.strides[d]) as u32;
            rest %= self.strides[d];
        }
    }

    #[inline]
    fn raw_index(&self, d: usize, v: T) -> i64 {
        let k = ((v - self.lower[d]) / self.eta[d]).floor();
        k.max(T::lit(-1e15)).min(T::lit(1e15)).to_i64().unwrap()
    }

    /// The cell containing `x`, or the overflow cell outside the range.
    /// Periodic coordinates are wrapped first.
    pub fn quantize(&self, x: &[T]) -> Result<StateId, AbstractionError> {
        assert_eq!(x.len(), self.dim());
        if x.iter().any(|v| !v.is_finite()) {
            return Err(AbstractionError::NonFinite);
        }
        let mut idx = [0u32; MAX_DIM];
        for d in 0..self.dim() {
            let n = self.cells[d] as i64;
            let k = self.raw_index(d, x[d]);
            idx[d] = if self.periodic[d] {
                k.rem_euclid(n) as u32
            } else if x[d] < self.lower[d] || x[d] > self.upper[d] {
                return Ok(self.overflow());
            } else {
                k.clamp(0, n - 1) as u32
            };
        }
        Ok(self.encode(&idx[..self.dim()]))
    }

    /// Closed box of a cell. Periodic coordinates are not wrapped.
    pub fn cell_rect(&self, id: StateId) -> Rect<T> {
        let mut idx = [0u32; MAX_DIM];
        self.decode(id, &mut idx);
        let mut r = Rect { dim: self.dim(), lo: [T::zero(); MAX_DIM], hi: [T::zero(); MAX_DIM] };
        for d in 0..self.dim() {
            r.lo[d] = self.lower[d] + T::from_u32(idx[d]).unwrap() * self.eta[d];
            r.hi[d] = if idx[d] + 1 == self.cells[d] { self.upper[d] } else { r.lo[d] + self.eta[d] };
        }
        r
    }

    pub fn cell_center(&self, id: StateId, out: &mut [T]) {
        let r = self.cell_rect(id);
        let half = T::lit(0.5);
        for d in 0..self.dim() {
            out[d] = (r.lo[d] + r.hi[d]) * half;
        }
    }

    /// Cells met by the enclosure `r`, read as `[lo, hi)` per dimension like
    /// the cells themselves. Overlaps thinner than `SLIVER` cell widths are
    /// rounding noise and ignored.
    pub fn index_box(&self, r: &Rect<T>) -> IndexBox {
        let mut b = IndexBox { start: [0; MAX_DIM], count: [0; MAX_DIM], dim: self.dim() as u8, overflow: false };
        let tol = T::lit(SLIVER);
        for d in 0..self.dim() {
            let n = self.cells[d] as i64;
            let to_i = |v: T| v.max(T::lit(-1e15)).min(T::lit(1e15)).to_i64().unwrap();
            let lo_f = (r.lo[d] - self.lower[d]) / self.eta[d];
            let hi_f = (r.hi[d] - self.lower[d]) / self.eta[d];
            let mut lo = to_i((lo_f + tol).floor());
            let mut hi = to_i((hi_f - tol).ceil()) - 1;
            if self.periodic[d] {
                b.start[d] = lo.rem_euclid(n) as u16;
                b.count[d] = (hi - lo + 1).clamp(0, n) as u16;
            } else {
                if lo_f < -tol || hi_f > T::from_i64(n).unwrap() + tol {
                    b.overflow = true;
                }
                lo = lo.max(0);
                hi = hi.min(n - 1);
                b.start[d] = lo.clamp(0, n - 1) as u16;
                b.count[d] = if hi >= lo { (hi - lo + 1) as u16 } else { 0 };
            }
        }
        b
    }

    /// Calls `f` for every grid cell of `b`; the overflow flag is ignored.
    pub fn for_each_cell(&self, b: &IndexBox, mut f: impl FnMut(StateId)) {
        self.visit_cells(b, |c| {
            f(c);
            true
        });
    }

    /// Like [`for_each_cell`](Self::for_each_cell) but stops as soon as `f`
    /// returns false; returns false in that case.
    pub fn visit_cells(&self, b: &IndexBox, mut f: impl FnMut(StateId) -> bool) -> bool {
        let n = self.dim();
        if b.n_cells() == 0 {
            return true;
        }
        let mut offs = [0u16; MAX_DIM];
        loop {
            let mut id = 0u64;
            for d in 0..n {
                let i = (b.start[d] as u32 + offs[d] as u32) % self.cells[d];
                id += i as u64 * self.strides[d];
            }
            if !f(id as StateId) {
                return false;
            }
            let mut d = n;
            loop {
                if d == 0 {
                    return true;
                }
                d -= 1;
                offs[d] += 1;
                if offs[d] < b.count[d] {
                    break;
                }
                offs[d] = 0;
            }
        }
    }

    /// Stable text description used for grid fingerprints.
    pub fn describe(&self) -> String {
        let join = |v: &[T]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        format!(
            "lower={};upper={};cells={};periodic={}",
            join(&self.lower),
            join(&self.upper),
            self.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            self.periodic.iter().map(|&p| if p { "1" } else { "0" }).collect::<Vec<_>>().join(",")
        )
    }
}
