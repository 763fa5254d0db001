//! Generalized Bellman-Ford-Yen solver, single-threaded reference version.

use crate::scalar::Scalar;

use super::pred::Predecessors;
use super::problem::{ControllerMap, DiscreteProblem, InputId, InputSet, SolveReport, StateId, ValueMap};

/// FIFO frontier with a membership mark so that a state is queued at most
/// once. Its length therefore never exceeds the number of states.
#[derive(Debug, Clone)]
pub(crate) struct Frontier {
    queue: Vec<StateId>,
    member: Vec<bool>,
}

impl Frontier {
    pub(crate) fn new(n: usize) -> Self {
        Self { queue: Vec::new(), member: vec![false; n] }
    }

    #[inline]
    pub(crate) fn push(&mut self, x: StateId) {
        let m = &mut self.member[x as usize];
        if !*m {
            *m = true;
            self.queue.push(x);
        }
    }

    pub(crate) fn take(&mut self) -> Vec<StateId> {
        let q = std::mem::take(&mut self.queue);
        for &x in &q {
            self.member[x as usize] = false;
        }
        q
    }

    #[cfg(test)]
    pub(crate) fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Solves `problem` with the generalized Bellman-Ford-Yen iteration.
///
/// `preds` must return a superset of the exact hypergraph predecessors.
/// When the report says `converged`, `values` is the value function and
/// `controller` realizes it. Otherwise the sweep cap `n_states` was hit with
/// a non-empty frontier, which happens when a negative cycle can be reached.
pub fn bellman_ford_yen<T: Scalar, P: Predecessors + ?Sized>(problem: &DiscreteProblem<T>, preds: &P) -> SolveReport<T> {
    let n = problem.n_states();
    let m = problem.n_inputs();
    let mut w: Vec<T> = problem.terminal_costs().to_vec();
    let mut mu = vec![InputSet::All; n];

    let mut scratch = Vec::new();
    let mut frontier = Frontier::new(n);
    for x in 0..n as StateId {
        if problem.terminal_cost(x) < T::infinity() {
            scratch.clear();
            preds.predecessors_any_input(x, &mut scratch);
            for &y in &scratch {
                frontier.push(y);
            }
        }
    }

    let mut active = frontier.take();
    let mut upcoming = Frontier::new(n);
    let mut sweeps = 0usize;
    let mut relaxations = 0u64;
    while !active.is_empty() && sweeps < n {
        for &x in &active {
            for u in 0..m as InputId {
                let d = problem.worst_case(x, u, |y| w[y as usize]);
                relaxations += 1;
                if d < w[x as usize] {
                    w[x as usize] = d;
                    mu[x as usize] = InputSet::One(u);
                    scratch.clear();
                    preds.predecessors_any_input(x, &mut scratch);
                    for &y in &scratch {
                        upcoming.push(y);
                    }
                }
            }
        }
        active = upcoming.take();
        sweeps += 1;
    }

    SolveReport {
        converged: active.is_empty(),
        sweeps,
        relaxations,
        values: ValueMap(w),
        controller: ControllerMap { n_inputs: m, choices: mu },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{PredIndex, ProblemBuilder};

    #[test]
    fn infinite_terminal_costs_need_no_sweep() {
        let mut b = ProblemBuilder::<f64>::new(3, 2);
        for x in 0..3 {
            for u in 0..2 {
                b.arc(x, u, &[(x + 1) % 3], -1.0).unwrap();
            }
        }
        let p = b.build().unwrap();
        let r = bellman_ford_yen(&p, &PredIndex::new(&p));
        assert!(r.converged);
        assert_eq!(r.sweeps, 0);
        assert_eq!(r.relaxations, 0);
        assert!(r.values.0.iter().all(|v| v.is_infinite()));
        assert!(r.controller.choices.iter().all(|c| c.is_handover()));
    }

    #[test]
    fn self_loop_reward_never_converges() {
        // a: self-loop with reward, G(a)=0; b: moves to a for free.
        let mut b = ProblemBuilder::<f64>::new(2, 1);
        b.arc(0, 0, &[0], -1.0).unwrap();
        b.arc(1, 0, &[0], 0.0).unwrap();
        b.terminal(0, 0.0).unwrap();
        let p = b.build().unwrap();
        let r = bellman_ford_yen(&p, &PredIndex::new(&p));
        assert!(!r.converged);
        assert_eq!(r.sweeps, 2);
        assert_eq!(r.values.0, vec![-2.0, -2.0]);
    }

    #[test]
    fn frontier_deduplicates() {
        let mut f = Frontier::new(4);
        for x in [2, 1, 2, 3, 1] {
            f.push(x);
        }
        assert_eq!(f.take(), vec![2, 1, 3]);
        assert!(f.is_empty());
        f.push(2);
        assert_eq!(f.take(), vec![2]);
    }
}
