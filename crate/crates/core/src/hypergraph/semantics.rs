//! Evaluation of costs, the dynamic programming operator and closed-loop
//! performance. These are plain single-threaded reference routines; the solver
//! never calls them.

use crate::scalar::{ext_add, Scalar};

use super::problem::{ControllerMap, DiscreteProblem, InputId, SignalPrefix, StateId, ValueMap};
use super::ProblemError;

/// Cost `G(x(T)) + sum_{t<T} g(x(t), x(t+1), u(t))` of a terminated signal.
pub fn cost_functional<T: Scalar>(problem: &DiscreteProblem<T>, signal: &SignalPrefix) -> Result<T, ProblemError> {
    if signal.states.len() != signal.inputs.len() + 1 {
        return Err(ProblemError::InvalidSignal(format!(
            "{} states for {} inputs",
            signal.states.len(),
            signal.inputs.len()
        )));
    }
    for &x in &signal.states {
        if x as usize >= problem.n_states() {
            return Err(ProblemError::StateOutOfRange { state: x as usize, n_states: problem.n_states() });
        }
    }
    let mut total = T::zero();
    for (t, &u) in signal.inputs.iter().enumerate() {
        if u as usize >= problem.n_inputs() {
            return Err(ProblemError::InputOutOfRange { input: u as usize, n_inputs: problem.n_inputs() });
        }
        let (x, y) = (signal.states[t], signal.states[t + 1]);
        let g = problem.running_cost(x, y, u).ok_or_else(|| {
            ProblemError::InvalidSignal(format!("step {t}: {y} is not in F({x},{u})"))
        })?;
        total = ext_add(total, g);
    }
    let last = *signal.states.last().expect("non-empty states");
    Ok(ext_add(total, problem.terminal_cost(last)))
}

/// One application of the dynamic programming operator
/// `P(W)(x) = min{ G(x), min_u max_{y in F(x,u)} g(x,y,u) + W(y) }`.
pub fn dp_operator<T: Scalar>(problem: &DiscreteProblem<T>, w: &ValueMap<T>) -> ValueMap<T> {
    assert_eq!(w.len(), problem.n_states());
    let out = (0..problem.n_states() as StateId)
        .map(|x| {
            let mut best = problem.terminal_cost(x);
            for u in 0..problem.n_inputs() as InputId {
                let d = problem.worst_case(x, u, |y| w.get(y));
                if d < best {
                    best = d;
                }
            }
            best
        })
        .collect();
    ValueMap(out)
}

/// Result of a plain fixed-point iteration.
#[derive(Debug, Clone)]
pub struct OracleOutcome<T> {
    pub values: ValueMap<T>,
    pub iterations: usize,
    /// `P(values) == values` was observed.
    pub stabilized: bool,
}

/// Iterates `P` from `W = G` until it stops changing or `max_iters` is hit.
///
/// This is the brute-force reference for the solver. Without negative cycles
/// it stabilises at the maximal fixed point, though not necessarily within
/// `n_states + 1` iterations: a negative loop inside a hyperarc keeps lowering
/// a value until the other head of the arc dominates.
pub fn value_iteration_oracle<T: Scalar>(problem: &DiscreteProblem<T>, max_iters: usize) -> OracleOutcome<T> {
    let mut w = ValueMap(problem.terminal_costs().to_vec());
    for k in 0..max_iters {
        let next = dp_operator(problem, &w);
        if next == w {
            return OracleOutcome { values: w, iterations: k + 1, stabilized: true };
        }
        w = next;
    }
    OracleOutcome { values: w, iterations: max_iters, stabilized: false }
}

/// Closed-loop performance `L(., mu)`.
///
/// Every input admitted by `mu(x)` may be applied, so the operator takes the
/// worst case over them:
/// `P_mu(W)(x) = min{ G(x), max_{u in mu(x)} max_{y in F(x,u)} g(x,y,u) + W(y) }`.
/// Iterated from `W = G` for at most `n_states` sweeps. Every iterate bounds
/// `L` from above; states still changing after the cap get no finite
/// certificate and are reported as `+inf`.
pub fn policy_performance<T: Scalar>(problem: &DiscreteProblem<T>, mu: &ControllerMap) -> ValueMap<T> {
    assert_eq!(mu.len(), problem.n_states());
    let n = problem.n_states();
    let step = |w: &[T]| -> Vec<T> {
        (0..n as StateId)
            .map(|x| {
                let mut worst = T::neg_infinity();
                for u in mu.inputs(x) {
                    let d = problem.worst_case(x, u, |y| w[y as usize]);
                    if d > worst {
                        worst = d;
                    }
                }
                let g = problem.terminal_cost(x);
                if worst < g {
                    worst
                } else {
                    g
                }
            })
            .collect()
    };
    let mut w = problem.terminal_costs().to_vec();
    for _ in 0..n {
        let next = step(&w);
        if next == w {
            return ValueMap(w);
        }
        w = next;
    }
    let next = step(&w);
    for (a, b) in w.iter_mut().zip(next) {
        if b != *a {
            *a = T::infinity();
        }
    }
    ValueMap(w)
}
