use crate::hypergraph::{DiscreteProblem, InputId, Predecessors, StateId};
use crate::scalar::Scalar;

/// Anything the parallel solver can run on: an explicit problem, or an
/// abstraction whose transitions are recomputed on demand.
pub trait TransitionSource<T: Scalar>: Sync {
    /// Representation of one forward image `F(x, u)`; this is what the
    /// transition cache stores.
    type Image: Send + Sync + 'static;
    /// Representation of a superset of `union_u pred(x, u)`.
    type Preds: Send + Sync + 'static;

    fn n_states(&self) -> usize;
    fn n_inputs(&self) -> usize;
    fn terminal_cost(&self, x: StateId) -> T;

    /// Computes `F(x, u)`. Must be a pure function of its arguments.
    fn forward_image(&self, x: StateId, u: InputId) -> Self::Image;

    /// Bytes accounted for a cached image.
    fn image_bytes(&self, image: &Self::Image) -> usize;

    /// `max_{y in F(x,u)} g(x, y, u) + w(y)` for an image previously returned
    /// by [`forward_image`](Self::forward_image). Once the maximum is known to
    /// be at least `bound`, any value `>= bound` may be returned instead.
    fn worst_case<W: Fn(StateId) -> T>(&self, x: StateId, u: InputId, image: &Self::Image, w: W, bound: T) -> T;

    /// Computes the predecessor set of `x`. Must be a pure function of `x`.
    fn predecessor_set(&self, x: StateId) -> Self::Preds;

    fn preds_bytes(&self, preds: &Self::Preds) -> usize;

    /// Calls `f` on every state of `preds`; repetitions are allowed.
    fn for_each_pred<F: FnMut(StateId)>(&self, preds: &Self::Preds, f: F);
}

/// An explicit [`DiscreteProblem`] paired with a predecessor function.
pub struct ProblemSource<'a, T, P: ?Sized> {
    pub problem: &'a DiscreteProblem<T>,
    pub preds: &'a P,
}

impl<'a, T, P: ?Sized> ProblemSource<'a, T, P> {
    pub fn new(problem: &'a DiscreteProblem<T>, preds: &'a P) -> Self {
        Self { problem, preds }
    }
}

impl<T: Scalar, P: Predecessors + ?Sized> TransitionSource<T> for ProblemSource<'_, T, P> {
    type Image = (StateId, InputId);
    type Preds = Vec<StateId>;

    fn n_states(&self) -> usize {
        self.problem.n_states()
    }

    fn n_inputs(&self) -> usize {
        self.problem.n_inputs()
    }

    fn terminal_cost(&self, x: StateId) -> T {
        self.problem.terminal_cost(x)
    }

    // Rows already live in memory, so the image is just a handle to the row.
    fn forward_image(&self, x: StateId, u: InputId) -> (StateId, InputId) {
        (x, u)
    }

    fn image_bytes(&self, _image: &(StateId, InputId)) -> usize {
        std::mem::size_of::<(StateId, InputId)>()
    }

    fn worst_case<W: Fn(StateId) -> T>(&self, _x: StateId, _u: InputId, image: &(StateId, InputId), w: W, _bound: T) -> T {
        self.problem.worst_case(image.0, image.1, w)
    }

    fn predecessor_set(&self, x: StateId) -> Vec<StateId> {
        let mut v = Vec::new();
        self.preds.predecessors_any_input(x, &mut v);
        v.sort_unstable();
        v.dedup();
        v
    }

    fn preds_bytes(&self, preds: &Vec<StateId>) -> usize {
        preds.len() * std::mem::size_of::<StateId>()
    }

    fn for_each_pred<F: FnMut(StateId)>(&self, preds: &Vec<StateId>, f: F) {
        preds.iter().copied().for_each(f)
    }
}
