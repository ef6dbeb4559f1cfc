//! Canonical labeling functions. Each takes an instance and an ambient
//! labeling coset `Δρ` and returns the subcoset `(Aut(X) ∩ Δ)π`, chosen so
//! that renaming the input renames the output the same way.

mod base;
mod hyper;
pub(crate) mod key;
mod objects;
mod set;

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::coset::LabelingCoset;

pub use objects::{group_object, CanonResult, CanonTable, Code, DEFAULT_GROUP_CAP};

/// Pair of a labeling coset and an edge of the ground set.
#[derive(Clone, Debug)]
pub struct HyperPair {
    pub coset: LabelingCoset,
    /// Sorted positions.
    pub edge: Vec<u32>,
}

/// Pair of a payload coset and a guide coset.
#[derive(Clone, Debug)]
pub struct SetPair {
    pub payload: LabelingCoset,
    pub guide: LabelingCoset,
}

/// A set of pairs `(v1, v2)` with pairwise distinct first and second entries.
pub type Matching = Vec<(u32, u32)>;

#[derive(Default)]
struct Counters {
    point: AtomicU64,
    matching: AtomicU64,
    int: AtomicU64,
    hyper: AtomicU64,
    set: AtomicU64,
}

/// Calls made to each recursive routine since the canonizer was created.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CallCounts {
    pub point: u64,
    pub matching: u64,
    pub int: u64,
    pub hyper: u64,
    pub set: u64,
}

/// Entry point to the canonizers. Holds the evaluation mode and call counters.
#[derive(Default)]
pub struct Canonizer {
    parallel: bool,
    counters: Counters,
}

impl Canonizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates independent branches on the rayon pool. Results are identical
    /// to sequential evaluation.
    pub fn parallel(parallel: bool) -> Self {
        Canonizer { parallel, counters: Counters::default() }
    }

    pub fn counts(&self) -> CallCounts {
        let c = &self.counters;
        CallCounts {
            point: c.point.load(Ordering::Relaxed),
            matching: c.matching.load(Ordering::Relaxed),
            int: c.int.load(Ordering::Relaxed),
            hyper: c.hyper.load(Ordering::Relaxed),
            set: c.set.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counts(&self) {
        let c = &self.counters;
        for a in [&c.point, &c.matching, &c.int, &c.hyper, &c.set] {
            a.store(0, Ordering::Relaxed);
        }
    }

    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        if self.parallel && items.len() > 1 {
            items.par_iter().map(f).collect()
        } else {
            items.iter().map(f).collect()
        }
    }
}

/// The order on finite sets of integers: by size, then by the least element of
/// the symmetric difference. Both inputs are sorted.
pub(crate) fn int_set_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Groups items with equal keys, classes in increasing key order.
pub(crate) fn ordered_partition<K: Ord, T>(mut items: Vec<(K, T)>) -> Vec<Vec<T>> {
    items.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut last: Option<K> = None;
    for (k, t) in items {
        if last.as_ref() == Some(&k) {
            out.last_mut().unwrap().push(t);
        } else {
            out.push(vec![t]);
            last = Some(k);
        }
    }
    out
}

/// Keeps the results whose key is least and returns their span.
pub(crate) fn span_of_minimal<K: Ord>(results: Vec<(K, LabelingCoset)>) -> LabelingCoset {
    let min = results.iter().map(|(k, _)| k).min().expect("at least one branch");
    let keep: Vec<LabelingCoset> = results.iter().filter(|(k, _)| k == min).map(|(_, c)| c.clone()).collect();
    LabelingCoset::span(&keep).expect("branches share a degree")
}
