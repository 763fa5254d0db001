use std::fmt;

use crate::scalar::Scalar;

use super::ProblemError;

/// State index. Problems are limited to `u32::MAX - 1` states.
pub type StateId = u32;
/// Input index.
pub type InputId = u32;

/// Finite optimal control problem `(X, U, F, G, g)`.
///
/// Transitions are stored as a compressed row per `(state, input)` pair: the
/// hyperarc heads `F(x, u)` together with the running cost `g(x, y, u)` of
/// each head.
#[derive(Clone, PartialEq)]
pub struct DiscreteProblem<T> {
    n_states: usize,
    n_inputs: usize,
    offsets: Vec<usize>,
    heads: Vec<StateId>,
    costs: Vec<T>,
    terminal: Vec<T>,
}

impl<T: Scalar> DiscreteProblem<T> {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// `F(x, u)` and the matching running costs.
    #[inline]
    pub fn image(&self, x: StateId, u: InputId) -> (&[StateId], &[T]) {
        let k = x as usize * self.n_inputs + u as usize;
        let r = self.offsets[k]..self.offsets[k + 1];
        (&self.heads[r.clone()], &self.costs[r])
    }

    #[inline]
    pub fn terminal_cost(&self, x: StateId) -> T {
        self.terminal[x as usize]
    }

    pub fn terminal_costs(&self) -> &[T] {
        &self.terminal
    }

    /// Running cost `g(x, y, u)`; `None` when `y` is not in `F(x, u)`.
    pub fn running_cost(&self, x: StateId, y: StateId, u: InputId) -> Option<T> {
        let (heads, costs) = self.image(x, u);
        heads.iter().position(|&h| h == y).map(|i| costs[i])
    }

    /// Total number of hyperarc heads, `sum |F(x, u)|`.
    pub fn arc_count(&self) -> usize {
        self.heads.len()
    }

    /// Worst-case cost of applying `u` at `x` against the value estimate `w`:
    /// `max_{y in F(x,u)} g(x,y,u) + w(y)`.
    #[inline]
    pub fn worst_case(&self, x: StateId, u: InputId, w: impl Fn(StateId) -> T) -> T {
        let (heads, costs) = self.image(x, u);
        let mut d = T::neg_infinity();
        for (&y, &g) in heads.iter().zip(costs) {
            let c = crate::scalar::ext_add(g, w(y));
            if c > d {
                d = c;
                if d == T::infinity() {
                    break;
                }
            }
        }
        d
    }

    /// Iterates over every `(x, u, heads, costs)` row.
    pub fn rows(&self) -> impl Iterator<Item = (StateId, InputId, &[StateId], &[T])> + '_ {
        (0..self.n_states).flat_map(move |x| {
            (0..self.n_inputs).map(move |u| {
                let (h, c) = self.image(x as StateId, u as InputId);
                (x as StateId, u as InputId, h, c)
            })
        })
    }

    /// Re-checks every structural invariant. Problems built through
    /// [`ProblemBuilder`] always pass.
    pub fn validate(&self) -> Result<(), ProblemError> {
        for (x, u, heads, costs) in self.rows() {
            if heads.is_empty() {
                return Err(ProblemError::EmptyImage { state: x, input: u });
            }
            for (&y, &g) in heads.iter().zip(costs) {
                if y as usize >= self.n_states {
                    return Err(ProblemError::StateOutOfRange { state: y as usize, n_states: self.n_states });
                }
                if g.is_nan() || g == T::neg_infinity() {
                    return Err(ProblemError::InvalidCost { what: format!("g({x},{y},{u})") });
                }
            }
        }
        for (x, &v) in self.terminal.iter().enumerate() {
            if v.is_nan() || v == T::neg_infinity() {
                return Err(ProblemError::InvalidCost { what: format!("G({x})") });
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for DiscreteProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteProblem")
            .field("n_states", &self.n_states)
            .field("n_inputs", &self.n_inputs)
            .field("arcs", &self.heads.len())
            .finish()
    }
}

/// Incremental constructor for [`DiscreteProblem`].
///
/// Terminal costs default to `+inf`. Adding the same head twice to one
/// `(x, u)` keeps the last cost.
#[derive(Debug, Clone)]
pub struct ProblemBuilder<T> {
    n_states: usize,
    n_inputs: usize,
    rows: Vec<Vec<(StateId, T)>>,
    terminal: Vec<T>,
}

impl<T: Scalar> ProblemBuilder<T> {
    pub fn new(n_states: usize, n_inputs: usize) -> Self {
        Self {
            n_states,
            n_inputs,
            rows: vec![Vec::new(); n_states * n_inputs],
            terminal: vec![T::infinity(); n_states],
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    fn check(&self, x: usize, u: usize) -> Result<(), ProblemError> {
        if x >= self.n_states {
            return Err(ProblemError::StateOutOfRange { state: x, n_states: self.n_states });
        }
        if u >= self.n_inputs {
            return Err(ProblemError::InputOutOfRange { input: u, n_inputs: self.n_inputs });
        }
        Ok(())
    }

    /// Adds heads `ys` to `F(x, u)`, all with running cost `cost`.
    pub fn arc(&mut self, x: usize, u: usize, ys: &[usize], cost: T) -> Result<&mut Self, ProblemError> {
        self.check(x, u)?;
        if cost.is_nan() || cost == T::neg_infinity() {
            return Err(ProblemError::InvalidCost { what: format!("g({x},_,{u})") });
        }
        for &y in ys {
            if y >= self.n_states {
                return Err(ProblemError::StateOutOfRange { state: y, n_states: self.n_states });
            }
            let row = &mut self.rows[x * self.n_inputs + u];
            match row.iter_mut().find(|(h, _)| *h as usize == y) {
                Some(e) => e.1 = cost,
                None => row.push((y as StateId, cost)),
            }
        }
        Ok(self)
    }

    pub fn terminal(&mut self, x: usize, value: T) -> Result<&mut Self, ProblemError> {
        if x >= self.n_states {
            return Err(ProblemError::StateOutOfRange { state: x, n_states: self.n_states });
        }
        if value.is_nan() || value == T::neg_infinity() {
            return Err(ProblemError::InvalidCost { what: format!("G({x})") });
        }
        self.terminal[x] = value;
        Ok(self)
    }

    /// Finishes construction, enforcing strictness of `F`.
    pub fn build(self) -> Result<DiscreteProblem<T>, ProblemError> {
        if self.n_states >= StateId::MAX as usize {
            return Err(ProblemError::TooManyStates(self.n_states));
        }
        if self.n_inputs == 0 {
            return Err(ProblemError::NoInputs);
        }
        let mut offsets = Vec::with_capacity(self.rows.len() + 1);
        let total: usize = self.rows.iter().map(Vec::len).sum();
        let mut heads = Vec::with_capacity(total);
        let mut costs = Vec::with_capacity(total);
        offsets.push(0);
        for (k, row) in self.rows.into_iter().enumerate() {
            if row.is_empty() {
                return Err(ProblemError::EmptyImage {
                    state: (k / self.n_inputs) as StateId,
                    input: (k % self.n_inputs) as InputId,
                });
            }
            for (y, g) in row {
                heads.push(y);
                costs.push(g);
            }
            offsets.push(heads.len());
        }
        Ok(DiscreteProblem {
            n_states: self.n_states,
            n_inputs: self.n_inputs,
            offsets,
            heads,
            costs,
            terminal: self.terminal,
        })
    }
}

/// Extended-real value per state (`W`).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMap<T>(pub Vec<T>);

impl<T: Scalar> ValueMap<T> {
    pub fn get(&self, x: StateId) -> T {
        self.0[x as usize]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    /// Largest absolute entry-wise difference; equal infinities count as 0,
    /// mismatched infinities as `+inf`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len(), "value maps of different size");
        let mut worst = T::zero();
        for (&a, &b) in self.0.iter().zip(&other.0) {
            let d = if a == b { T::zero() } else { (a - b).abs() };
            let d = if d.is_nan() { T::infinity() } else { d };
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// Controller image at one state.
///
/// The solver only ever produces the full input set (hand over control) or a
/// single input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputSet {
    All,
    One(InputId),
}

impl InputSet {
    pub fn contains(self, u: InputId) -> bool {
        match self {
            InputSet::All => true,
            InputSet::One(v) => v == u,
        }
    }

    pub fn is_handover(self) -> bool {
        matches!(self, InputSet::All)
    }

    /// `u32::MAX` for the full set, the input index otherwise.
    pub fn encode(self) -> u32 {
        match self {
            InputSet::All => u32::MAX,
            InputSet::One(u) => u,
        }
    }

    pub fn decode(v: u32) -> Self {
        if v == u32::MAX {
            InputSet::All
        } else {
            InputSet::One(v)
        }
    }
}

/// Static strict controller `mu: X => U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControllerMap {
    pub n_inputs: usize,
    pub choices: Vec<InputSet>,
}

impl ControllerMap {
    pub fn uniform(n_states: usize, n_inputs: usize, choice: InputSet) -> Self {
        Self { n_inputs, choices: vec![choice; n_states] }
    }

    pub fn get(&self, x: StateId) -> InputSet {
        self.choices[x as usize]
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// Inputs permitted at `x`.
    pub fn inputs(&self, x: StateId) -> impl Iterator<Item = InputId> + '_ {
        let c = self.get(x);
        (0..self.n_inputs as InputId).filter(move |&u| c.contains(u))
    }
}

/// Finite prefix of a behaviour together with its termination index `T`:
/// states `x(0..=T)` and inputs `u(0..T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalPrefix {
    pub states: Vec<StateId>,
    pub inputs: Vec<InputId>,
}

impl SignalPrefix {
    pub fn new(states: Vec<StateId>, inputs: Vec<InputId>) -> Self {
        Self { states, inputs }
    }

    /// Hand-over at time 0.
    pub fn immediate(p: StateId) -> Self {
        Self { states: vec![p], inputs: Vec::new() }
    }

    pub fn termination_index(&self) -> usize {
        self.inputs.len()
    }
}

/// Solver result.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    /// Active frontier was empty at exit. Only then is `values` certified to
    /// be the value function.
    pub converged: bool,
    pub sweeps: usize,
    /// Number of `(x, u)` worst-case evaluations.
    pub relaxations: u64,
    pub values: ValueMap<T>,
    pub controller: ControllerMap,
}
