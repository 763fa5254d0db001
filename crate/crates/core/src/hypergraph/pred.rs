use crate::scalar::Scalar;

use super::problem::{DiscreteProblem, InputId, StateId};

/// Source of hypergraph predecessors `pred(x, u) = { y | x in F(y, u) }`.
///
/// Implementations may return a superset; the solver stays correct, it only
/// performs more relaxations. Duplicates in `out` are allowed.
pub trait Predecessors: Sync {
    fn n_inputs(&self) -> usize;

    /// Appends `pred(x, u)` to `out`.
    fn predecessors(&self, x: StateId, u: InputId, out: &mut Vec<StateId>);

    /// Appends the union over all inputs of `pred(x, u)` to `out`.
    fn predecessors_any_input(&self, x: StateId, out: &mut Vec<StateId>) {
        for u in 0..self.n_inputs() as InputId {
            self.predecessors(x, u, out);
        }
    }
}

/// Exact reverse index of a [`DiscreteProblem`].
#[derive(Debug, Clone)]
pub struct PredIndex {
    n_inputs: usize,
    offsets: Vec<usize>,
    sources: Vec<StateId>,
}

impl PredIndex {
    pub fn new<T: Scalar>(problem: &DiscreteProblem<T>) -> Self {
        let n = problem.n_states();
        let m = problem.n_inputs();
        let mut counts = vec![0usize; n * m + 1];
        for (_, u, heads, _) in problem.rows() {
            for &y in heads {
                counts[y as usize * m + u as usize + 1] += 1;
            }
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut sources = vec![0; problem.arc_count()];
        for (x, u, heads, _) in problem.rows() {
            for &y in heads {
                let k = y as usize * m + u as usize;
                sources[fill[k]] = x;
                fill[k] += 1;
            }
        }
        Self { n_inputs: m, offsets, sources }
    }

    pub fn get(&self, x: StateId, u: InputId) -> &[StateId] {
        let k = x as usize * self.n_inputs + u as usize;
        &self.sources[self.offsets[k]..self.offsets[k + 1]]
    }
}

impl Predecessors for PredIndex {
    fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    fn predecessors(&self, x: StateId, u: InputId, out: &mut Vec<StateId>) {
        out.extend_from_slice(self.get(x, u));
    }
}

/// `pred(x, u)` of a problem, sorted and without duplicates.
pub fn predecessors<T: Scalar>(problem: &DiscreteProblem<T>, x: StateId, u: InputId) -> Vec<StateId> {
    let mut v: Vec<StateId> = (0..problem.n_states() as StateId)
        .filter(|&y| problem.image(y, u).0.contains(&x))
        .collect();
    v.sort_unstable();
    v
}

/// Exact predecessors plus a fixed set of spurious extra states per
/// `(x, u)`.
#[derive(Debug, Clone)]
pub struct PaddedPredecessors<P> {
    inner: P,
    extra: Vec<Vec<StateId>>,
}

impl<P: Predecessors> PaddedPredecessors<P> {
    /// `extra[x * n_inputs + u]` is appended to `pred(x, u)`.
    pub fn new(inner: P, extra: Vec<Vec<StateId>>) -> Self {
        Self { inner, extra }
    }
}

impl<P: Predecessors> Predecessors for PaddedPredecessors<P> {
    fn n_inputs(&self) -> usize {
        self.inner.n_inputs()
    }

    fn predecessors(&self, x: StateId, u: InputId, out: &mut Vec<StateId>) {
        self.inner.predecessors(x, u, out);
        if let Some(e) = self.extra.get(x as usize * self.n_inputs() + u as usize) {
            out.extend_from_slice(e);
        }
    }
}

impl<P: Predecessors + ?Sized> Predecessors for &P {
    fn n_inputs(&self) -> usize {
        (**self).n_inputs()
    }

    fn predecessors(&self, x: StateId, u: InputId, out: &mut Vec<StateId>) {
        (**self).predecessors(x, u, out)
    }

    fn predecessors_any_input(&self, x: StateId, out: &mut Vec<StateId>) {
        (**self).predecessors_any_input(x, out)
    }
}
