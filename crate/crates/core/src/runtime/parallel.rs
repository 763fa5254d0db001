use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::hypergraph::{ControllerMap, InputId, InputSet, SolveReport, StateId, ValueMap};
use crate::scalar::{AtomicScalar, Scalar};

use super::cache::{slot_table_bytes, CachePolicy, TransitionCache};
use super::metrics::SweepMetrics;
use super::source::TransitionSource;
use super::SolveError;

/// Execution options for [`solve_parallel`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub workers: usize,
    /// Total memory the solver may account for: value and controller arrays,
    /// both frontiers and, with what is left, the transition cache. Only
    /// enforced by [`CachePolicy::Budgeted`].
    pub memory_budget_bytes: usize,
    pub cache_policy: CachePolicy,
    /// Log a progress line every this many sweeps (0 disables logging).
    pub metrics_interval: usize,
    /// Sweep cap below the default of one sweep per state.
    pub max_sweeps: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { workers: 1, memory_budget_bytes: 0, cache_policy: CachePolicy::All, metrics_interval: 0, max_sweeps: None }
    }
}

impl SolveOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_cache(mut self, policy: CachePolicy) -> Self {
        self.cache_policy = policy;
        self
    }

    pub fn with_budget(mut self, bytes: usize) -> Self {
        self.memory_budget_bytes = bytes;
        self
    }
}

/// Bytes the solver holds besides cache entries for `n` states and `m`
/// inputs: W, mu, two frontiers, the membership bitset and the cache slots.
pub fn working_set_bytes<T: Scalar>(n: usize, m: usize, policy: CachePolicy) -> usize {
    n * (T::BYTES + 4) + 2 * n * 4 + n.div_ceil(64) * 8 + slot_table_bytes(policy, n, m)
}

/// Solver output plus run statistics.
#[derive(Debug, Clone)]
pub struct ParallelReport<T> {
    pub report: SolveReport<T>,
    pub metrics: Vec<SweepMetrics>,
    pub peak_cache_bytes: usize,
    /// Largest accounted cache size observed at any sweep boundary.
    pub peak_boundary_cache_bytes: usize,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub workers: usize,
}

struct Bitset(Vec<AtomicU64>);

impl Bitset {
    fn new(n: usize) -> Self {
        Self((0..n.div_ceil(64)).map(|_| AtomicU64::new(0)).collect())
    }

    /// Sets bit `i`; true if it was clear.
    #[inline]
    fn test_and_set(&self, i: StateId) -> bool {
        let bit = 1u64 << (i % 64);
        self.0[(i / 64) as usize].fetch_or(bit, Ordering::AcqRel) & bit == 0
    }

    #[inline]
    fn get(&self, i: StateId) -> bool {
        self.0[(i / 64) as usize].load(Ordering::Relaxed) & (1u64 << (i % 64)) != 0
    }

    fn clear(&self, i: StateId) {
        self.0[(i / 64) as usize].fetch_and(!(1u64 << (i % 64)), Ordering::Relaxed);
    }
}

#[derive(Default)]
struct Local {
    next: Vec<StateId>,
    relaxations: u64,
    improved: u64,
}

struct Shared<'a, T: Scalar, S: TransitionSource<T>> {
    source: &'a S,
    cache: &'a TransitionCache<S::Image, S::Preds>,
    w: &'a [T::Atomic],
    mu: &'a [AtomicU32],
    mark: &'a Bitset,
}

impl<T: Scalar, S: TransitionSource<T>> Shared<'_, T, S> {
    fn enqueue_preds(&self, x: StateId, local: &mut Local) {
        let preds =
            self.cache.preds(x, || self.source.predecessor_set(x), |p| self.source.preds_bytes(p));
        self.source.for_each_pred(&preds, |y| {
            if self.mark.test_and_set(y) {
                local.next.push(y);
            }
        });
    }

    /// Lines 12-18 of the sweep for every state of `chunk`. Each state appears
    /// in exactly one chunk, so `W(x)` and `mu(x)` have a single writer per
    /// sweep; other workers may read `W(x)` concurrently.
    fn process(&self, chunk: &[StateId]) -> Local {
        let mut local = Local::default();
        let m = self.source.n_inputs() as InputId;
        for &x in chunk {
            let mut improved = false;
            for u in 0..m {
                let img = self
                    .cache
                    .forward(x, u, || self.source.forward_image(x, u), |i| self.source.image_bytes(i));
                let d = self.source.worst_case(x, u, &img, |y| self.w[y as usize].load(), self.w[x as usize].load());
                local.relaxations += 1;
                if self.w[x as usize].fetch_min(d) {
                    self.mu[x as usize].store(u, Ordering::Relaxed);
                    improved = true;
                }
            }
            if improved {
                self.enqueue_preds(x, &mut local);
                local.improved += 1;
            }
        }
        local
    }
}

/// Parallel generalized Bellman-Ford-Yen solve over any [`TransitionSource`].
///
/// The final value map equals the one of the sequential solver for every
/// worker count and cache policy; the controller may differ where several
/// inputs are optimal.
pub fn solve_parallel<T: Scalar, S: TransitionSource<T>>(
    source: &S,
    opts: &SolveOptions,
) -> Result<ParallelReport<T>, SolveError> {
    if opts.workers == 0 {
        return Err(SolveError::InvalidOptions("worker_count must be at least 1".into()));
    }
    let n = source.n_states();
    let m = source.n_inputs();
    let capacity = match opts.cache_policy {
        CachePolicy::Budgeted => {
            if opts.memory_budget_bytes == 0 {
                return Err(SolveError::InvalidOptions("budgeted cache needs memory_budget_bytes > 0".into()));
            }
            let minimum = working_set_bytes::<T>(n, m, opts.cache_policy);
            if opts.memory_budget_bytes < minimum {
                return Err(SolveError::BudgetTooSmall { budget: opts.memory_budget_bytes, minimum });
            }
            opts.memory_budget_bytes - minimum
        }
        _ => usize::MAX,
    };
    let pool = if opts.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .map_err(|e| SolveError::InvalidOptions(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };

    let cache = TransitionCache::<S::Image, S::Preds>::new(opts.cache_policy, capacity, n, m);
    let w: Vec<T::Atomic> = (0..n as StateId).map(|x| T::Atomic::new(source.terminal_cost(x))).collect();
    let mu: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(InputSet::All.encode())).collect();
    let mark = Bitset::new(n);
    let shared = Shared { source, cache: &cache, w: &w, mu: &mu, mark: &mark };

    let chunk_len = |len: usize| (len / (opts.workers * 8)).max(64);
    let run = |items: &[StateId], f: &(dyn Fn(&[StateId]) -> Local + Sync)| -> Vec<Local> {
        match &pool {
            Some(pool) if items.len() > 64 => {
                pool.install(|| items.par_chunks(chunk_len(items.len())).map(f).collect())
            }
            _ => vec![f(items)],
        }
    };

    // Seed: predecessors of every state with finite terminal cost.
    let seeds: Vec<StateId> = (0..n as StateId).filter(|&x| source.terminal_cost(x) < T::infinity()).collect();
    let locals = run(&seeds, &|chunk| {
        let mut local = Local::default();
        for &x in chunk {
            shared.enqueue_preds(x, &mut local);
        }
        local
    });
    let mut active: Vec<StateId> = locals.into_iter().flat_map(|l| l.next).collect();
    cache.end_sweep(|x| mark.get(x), |i| source.image_bytes(i), |p| source.preds_bytes(p));

    let mut sweeps = 0usize;
    let mut relaxations = 0u64;
    let mut metrics = Vec::new();
    let mut peak_boundary = cache.bytes();
    let cap = opts.max_sweeps.map_or(n, |c| c.min(n));
    while !active.is_empty() && sweeps < cap {
        let started = Instant::now();
        for &x in &active {
            mark.clear(x);
        }
        let locals = run(&active, &|chunk| shared.process(chunk));
        let mut next = Vec::new();
        let (mut relax, mut improved) = (0u64, 0u64);
        for l in locals {
            relax += l.relaxations;
            improved += l.improved;
            next.extend(l.next);
        }
        cache.end_sweep(|x| mark.get(x), |i| source.image_bytes(i), |p| source.preds_bytes(p));
        sweeps += 1;
        relaxations += relax;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let row = SweepMetrics {
            sweep: sweeps,
            wall_ms,
            frontier: active.len(),
            relaxations: relax,
            improved,
            cache_bytes: cache.bytes(),
            per_msec: active.len() as f64 / wall_ms.max(1e-6),
        };
        peak_boundary = peak_boundary.max(row.cache_bytes);
        if opts.metrics_interval > 0 && sweeps % opts.metrics_interval == 0 {
            log::info!(
                "sweep {} frontier {} improved {} cache {} B ({:.1} ms)",
                row.sweep,
                row.frontier,
                row.improved,
                row.cache_bytes,
                row.wall_ms
            );
        }
        metrics.push(row);
        active = next;
    }

    let values = ValueMap(w.iter().map(|a| a.load()).collect());
    let choices = mu.iter().map(|a| InputSet::decode(a.load(Ordering::Relaxed))).collect();
    Ok(ParallelReport {
        report: SolveReport {
            converged: active.is_empty(),
            sweeps,
            relaxations,
            values,
            controller: ControllerMap { n_inputs: m, choices },
        },
        metrics,
        peak_cache_bytes: cache.peak_bytes(),
        peak_boundary_cache_bytes: peak_boundary,
        cache_hits: cache.hits(),
        cache_misses: cache.misses(),
        workers: opts.workers,
    })
}
