//! Best-effort miss-ratio estimate for the pull engine's source-value reads.
//!
//! A single fully associative LRU cache of `capacity` lines replays the
//! address stream of one pull iteration. It ignores associativity, prefetch
//! and every other array, so treat the result as a rough input to the model.

use alloc::collections::BTreeMap;

use crate::CsrGraph;

#[derive(Clone, Debug)]
pub struct LruLineCache {
    capacity: usize,
    clock: u64,
    by_line: BTreeMap<u64, u64>,
    by_stamp: BTreeMap<u64, u64>,
    hits: u64,
    misses: u64,
}

impl LruLineCache {
    pub fn new(capacity: usize) -> Self {
        LruLineCache {
            capacity: capacity.max(1),
            clock: 0,
            by_line: BTreeMap::new(),
            by_stamp: BTreeMap::new(),
            hits: 0,
            misses: 0,
        }
    }

    /// Touches `line`; returns whether it was resident.
    pub fn access(&mut self, line: u64) -> bool {
        self.clock += 1;
        let hit = if let Some(stamp) = self.by_line.insert(line, self.clock) {
            self.by_stamp.remove(&stamp);
            true
        } else {
            if self.by_line.len() > self.capacity {
                if let Some((_, victim)) = self.by_stamp.pop_first() {
                    self.by_line.remove(&victim);
                }
            }
            false
        };
        self.by_stamp.insert(self.clock, line);
        if hit {
            self.hits += 1;
        } else {
            self.misses += 1;
        }
        hit
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn miss_ratio(&self) -> f64 {
        let total = self.hits + self.misses;
        if total == 0 {
            0.0
        } else {
            self.misses as f64 / total as f64
        }
    }
}

/// Replays the source-value reads of one pull iteration over `g_in` (the
/// transposed graph) through an LRU cache of `cache_bytes`.
pub fn estimate_pdpr_miss_ratio(g_in: &CsrGraph, value_bytes: usize, line_bytes: usize, cache_bytes: usize) -> f64 {
    let mut cache = LruLineCache::new(cache_bytes / line_bytes.max(1));
    for &u in g_in.targets() {
        cache.access((u as u64 * value_bytes as u64) / line_bytes as u64);
    }
    cache.miss_ratio()
}
