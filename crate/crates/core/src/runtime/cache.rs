//! Byte-accounted cache of forward images and predecessor sets.
//!
//! Entries are inserted while a sweep runs (concurrent readers, per-slot
//! locks). Under the budgeted policy inserts that would overflow the budget
//! are refused and the value is simply recomputed next time; once the budget
//! has been hit, every sweep boundary drops all entries except the ones the
//! next sweep will read.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;

use crate::hypergraph::{InputId, StateId};

/// What the solver keeps in memory between uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CachePolicy {
    /// Keep every computed image for the whole run.
    All,
    /// Keep images while the byte budget allows, evict at sweep boundaries.
    Budgeted,
    /// Recompute every image on every use.
    None,
}

impl std::str::FromStr for CachePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Self::All),
            "budgeted" => Ok(Self::Budgeted),
            "none" => Ok(Self::None),
            other => Err(format!("unknown cache policy `{other}` (expected all, budgeted or none)")),
        }
    }
}

impl std::fmt::Display for CachePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::All => "all",
            Self::Budgeted => "budgeted",
            Self::None => "none",
        })
    }
}

/// Fixed per-entry charge: reference count header and allocator slack.
pub const ENTRY_OVERHEAD: usize = 48;

type Slot<V> = RwLock<Option<Arc<V>>>;

/// Per-run transition cache with one slot per `(state, input)` pair and one
/// per state for predecessor sets.
pub struct TransitionCache<I, P> {
    policy: CachePolicy,
    capacity: usize,
    forward: Vec<Slot<I>>,
    preds: Vec<Slot<P>>,
    n_inputs: usize,
    bytes: AtomicUsize,
    peak: AtomicUsize,
    saturated: AtomicBool,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<I, P> std::fmt::Debug for TransitionCache<I, P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransitionCache")
            .field("policy", &self.policy)
            .field("capacity", &self.capacity)
            .field("bytes", &self.bytes.load(Ordering::Relaxed))
            .finish()
    }
}

/// Bytes of the slot tables for `n_states` states and `n_inputs` inputs.
pub fn slot_table_bytes(policy: CachePolicy, n_states: usize, n_inputs: usize) -> usize {
    match policy {
        CachePolicy::None => 0,
        _ => n_states * (n_inputs + 1) * std::mem::size_of::<Slot<()>>(),
    }
}

fn slots<V>(n: usize) -> Vec<Slot<V>> {
    (0..n).map(|_| RwLock::new(None)).collect()
}

impl<I: Send + Sync, P: Send + Sync> TransitionCache<I, P> {
    /// `capacity` is only enforced for [`CachePolicy::Budgeted`].
    pub fn new(policy: CachePolicy, capacity: usize, n_states: usize, n_inputs: usize) -> Self {
        let (nf, np) = if policy == CachePolicy::None { (0, 0) } else { (n_states * n_inputs, n_states) };
        Self {
            policy,
            capacity,
            forward: slots(nf),
            preds: slots(np),
            n_inputs,
            bytes: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
            saturated: AtomicBool::new(false),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn policy(&self) -> CachePolicy {
        self.policy
    }

    /// Accounted bytes currently held.
    pub fn bytes(&self) -> usize {
        self.bytes.load(Ordering::Relaxed)
    }

    pub fn peak_bytes(&self) -> usize {
        self.peak.load(Ordering::Relaxed)
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    fn reserve(&self, size: usize) -> bool {
        match self.policy {
            CachePolicy::None => false,
            CachePolicy::All => {
                let now = self.bytes.fetch_add(size, Ordering::Relaxed) + size;
                self.peak.fetch_max(now, Ordering::Relaxed);
                true
            }
            CachePolicy::Budgeted => {
                let prev = self.bytes.fetch_add(size, Ordering::Relaxed);
                if prev + size > self.capacity {
                    self.bytes.fetch_sub(size, Ordering::Relaxed);
                    self.saturated.store(true, Ordering::Relaxed);
                    false
                } else {
                    self.peak.fetch_max(prev + size, Ordering::Relaxed);
                    true
                }
            }
        }
    }

    fn lookup<V>(
        &self,
        slot: Option<&Slot<V>>,
        compute: impl FnOnce() -> V,
        size_of: impl FnOnce(&V) -> usize,
    ) -> Arc<V> {
        if let Some(v) = slot.and_then(|s| s.read().clone()) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v;
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = Arc::new(compute());
        if let Some(slot) = slot {
            let size = size_of(&value) + ENTRY_OVERHEAD;
            if self.reserve(size) {
                let mut guard = slot.write();
                if guard.is_some() {
                    drop(guard);
                    self.bytes.fetch_sub(size, Ordering::Relaxed);
                } else {
                    *guard = Some(Arc::clone(&value));
                }
            }
        }
        value
    }

    /// Forward image of `(x, u)`; computed on a miss and stored if the policy
    /// admits it.
    pub fn forward(
        &self,
        x: StateId,
        u: InputId,
        compute: impl FnOnce() -> I,
        size_of: impl FnOnce(&I) -> usize,
    ) -> Arc<I> {
        let slot = self.forward.get(x as usize * self.n_inputs + u as usize);
        self.lookup(slot, compute, size_of)
    }

    /// Predecessor set of `x` over all inputs; computed on a miss.
    pub fn preds(&self, x: StateId, compute: impl FnOnce() -> P, size_of: impl FnOnce(&P) -> usize) -> Arc<P> {
        self.lookup(self.preds.get(x as usize), compute, size_of)
    }

    /// Sweep-boundary eviction. With the budgeted policy, once the budget has
    /// been reached, drops every entry whose state is not `retain`ed.
    /// The size functions must agree with the ones used on insertion.
    pub fn end_sweep(
        &self,
        retain: impl Fn(StateId) -> bool,
        image_size: impl Fn(&I) -> usize,
        preds_size: impl Fn(&P) -> usize,
    ) {
        if self.policy != CachePolicy::Budgeted || !self.saturated.load(Ordering::Relaxed) {
            return;
        }
        let mut freed = 0usize;
        for (x, p) in self.preds.iter().enumerate() {
            if retain(x as StateId) {
                continue;
            }
            if let Some(v) = p.write().take() {
                freed += preds_size(&v) + ENTRY_OVERHEAD;
            }
            for s in &self.forward[x * self.n_inputs..(x + 1) * self.n_inputs] {
                if let Some(v) = s.write().take() {
                    freed += image_size(&v) + ENTRY_OVERHEAD;
                }
            }
        }
        self.bytes.fetch_sub(freed, Ordering::Relaxed);
    }
}
