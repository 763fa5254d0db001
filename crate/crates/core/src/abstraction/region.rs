use crate::scalar::Scalar;

use super::grid::{GridCover, Rect};

/// Finite union of closed boxes in the state space. Bounds may be infinite.
/// In periodic dimensions of a grid, an interval also stands for all of its
/// translates by the period.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region<T> {
    pub boxes: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar> Region<T> {
    pub fn empty() -> Self {
        Self { boxes: Vec::new() }
    }

    pub fn from_box(lo: Vec<T>, hi: Vec<T>) -> Self {
        Self { boxes: vec![(lo, hi)] }
    }

    pub fn with_box(mut self, lo: Vec<T>, hi: Vec<T>) -> Self {
        self.boxes.push((lo, hi));
        self
    }

    pub fn union(mut self, other: &Region<T>) -> Self {
        self.boxes.extend(other.boxes.iter().cloned());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    fn shifts(cover: &GridCover<T>, d: usize) -> impl Iterator<Item = T> {
        let p = cover.period(d);
        let list = match p {
            Some(p) => [T::zero(), p, -p],
            None => [T::zero(), T::nan(), T::nan()],
        };
        list.into_iter().filter(|s| !s.is_nan())
    }

    /// Does some box meet the closed rectangle `r`?
    pub fn intersects(&self, cover: &GridCover<T>, r: &Rect<T>) -> bool {
        self.boxes.iter().any(|(lo, hi)| {
            (0..r.dim).all(|d| Self::shifts(cover, d).any(|s| r.lo[d] + s <= hi[d] && lo[d] <= r.hi[d] + s))
        })
    }

    /// Is the closed rectangle `r` inside a single box of the union?
    pub fn contains_rect(&self, cover: &GridCover<T>, r: &Rect<T>) -> bool {
        self.boxes.iter().any(|(lo, hi)| {
            (0..r.dim).all(|d| Self::shifts(cover, d).any(|s| lo[d] <= r.lo[d] + s && r.hi[d] + s <= hi[d]))
        })
    }

    pub fn contains_point(&self, cover: &GridCover<T>, x: &[T]) -> bool {
        self.boxes.iter().any(|(lo, hi)| {
            (0..x.len()).all(|d| match cover.period(d) {
                Some(p) => {
                    let k = ((x[d] - lo[d]) / p).floor();
                    let v = x[d] - k * p;
                    v <= hi[d]
                }
                None => lo[d] <= x[d] && x[d] <= hi[d],
            })
        })
    }
}
