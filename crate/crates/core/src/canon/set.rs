use std::collections::HashMap;
use std::sync::atomic::Ordering::Relaxed;

use super::base::half_split_branches;
use super::key::{coset_image, int_set, push_ints, push_ordered_coset, push_set};
use super::{int_set_cmp, ordered_partition, span_of_minimal, Canonizer, HyperPair, SetPair};
use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::object::positional_coset_bytes;
use crate::perm::Perm;

/// Key of the ordered image of a set of pairs under `lambda`.
fn pairs_key(l: &[SetPair], lambda: &Perm) -> Vec<u8> {
    let items = l
        .iter()
        .map(|p| {
            let a = coset_image(&p.payload, lambda);
            let b = coset_image(&p.guide, lambda);
            let mut it = Vec::with_capacity(a.len() + b.len() + 8);
            it.extend_from_slice(&(a.len() as u32).to_be_bytes());
            it.extend_from_slice(&a);
            it.extend_from_slice(&b);
            it
        })
        .collect();
    let mut out = Vec::new();
    push_set(&mut out, items);
    out
}

/// `(A^τ, C^τ, τ^-1 Θ τ)` for a guide `Θτ`.
fn triple_key(guide: &LabelingCoset, a: &[u32], cs: &[u32]) -> Vec<u8> {
    let tau = guide.rep();
    let mut out = Vec::new();
    push_ints(&mut out, &int_set(tau, a));
    push_ints(&mut out, &int_set(tau, cs));
    push_ordered_coset(&mut out, &guide.apply_map(tau));
    out
}

/// Equal exactly when the restrictions of the guides to `sub` are equal.
fn restriction_key(guide: &LabelingCoset, sub: &[u32]) -> Vec<u8> {
    if sub.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    push_ints(&mut out, &int_set(guide.rep(), sub));
    out.extend(positional_coset_bytes(&guide.induce_unchecked(sub, false)));
    out
}

fn least_orbit(guide: &LabelingCoset, a: &[u32]) -> Vec<u32> {
    let tau = guide.rep();
    guide
        .group()
        .orbits_within(a)
        .into_iter()
        .min_by(|x, y| int_set_cmp(&int_set(tau, x), &int_set(tau, y)))
        .unwrap()
}

fn bundle_by<K: PartialEq>(l: &[SetPair], key: impl Fn(&SetPair) -> K) -> Vec<(K, Vec<SetPair>)> {
    let mut out: Vec<(K, Vec<SetPair>)> = Vec::new();
    for p in l {
        let k = key(p);
        match out.iter_mut().find(|(x, _)| *x == k) {
            Some((_, b)) => b.push(p.clone()),
            None => out.push((k, vec![p.clone()])),
        }
    }
    out
}

fn union_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

fn minus(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect()
}

impl Canonizer {
    /// Canonical labeling of a set of labeling cosets with respect to `Δρ`.
    pub fn cl_set(&self, j: &[LabelingCoset], c: &LabelingCoset) -> Result<LabelingCoset> {
        let n = c.degree();
        let mut uniq: Vec<LabelingCoset> = Vec::new();
        for x in j {
            if x.degree() != n {
                return Err(Error::DomainMismatch("coset over a different ground set".into()));
            }
            if !uniq.contains(x) {
                uniq.push(x.clone());
            }
        }
        Ok(self.cl_set_unique(&uniq, c))
    }

    pub(crate) fn cl_set_unique(&self, j: &[LabelingCoset], c: &LabelingCoset) -> LabelingCoset {
        let all: Vec<u32> = (0..c.degree() as u32).collect();
        if j.is_empty() {
            return self.set_rec(&[], &all, &[], c);
        }
        let pre = self.map(j, |x| {
            let p = self.cl_int(x, c);
            (coset_image(x, p.rep()), p)
        });
        let mut acc = c.clone();
        for class in ordered_partition(pre) {
            let l: Vec<SetPair> = class.into_iter().map(|p| SetPair { payload: p.clone(), guide: p }).collect();
            acc = self.set_rec(&l, &all, &[], &acc);
        }
        acc
    }

    /// The generalized problem: pairs of payload and guide cosets, a focus `a`
    /// and a fixed part `cs`, both invariant under every guide group. Guides
    /// must agree on `cs` and be pairwise distinct on `a ∪ cs`.
    pub fn cl_set_pairs(&self, l: &[SetPair], a: &[u32], cs: &[u32], c: &LabelingCoset) -> Result<LabelingCoset> {
        let n = c.degree();
        for p in l {
            if p.payload.degree() != n || p.guide.degree() != n {
                return Err(Error::DomainMismatch("pair over a different ground set".into()));
            }
            if !p.guide.group().is_invariant(a) || !p.guide.group().is_invariant(cs) {
                return Err(Error::NotInvariant("guide group must stabilize the focus and the fixed part".into()));
            }
        }
        let on_c: Vec<Vec<u8>> = l.iter().map(|p| restriction_key(&p.guide, cs)).collect();
        if on_c.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Precondition("guides differ on the fixed part".into()));
        }
        let both = union_sorted(a, cs);
        let on_ac: Vec<Vec<u8>> = l.iter().map(|p| restriction_key(&p.guide, &both)).collect();
        for i in 0..on_ac.len() {
            if on_ac[i + 1..].contains(&on_ac[i]) {
                return Err(Error::Precondition("guides coincide on the focus and the fixed part".into()));
            }
        }
        Ok(self.set_rec(l, a, cs, c))
    }

    pub(crate) fn set_rec(&self, l: &[SetPair], a: &[u32], cs: &[u32], amb: &LabelingCoset) -> LabelingCoset {
        self.counters.set.fetch_add(1, Relaxed);
        let n = amb.degree();
        if l.is_empty() {
            let x = self.cl_int(&LabelingCoset::set_labeling(a, n), amb);
            return self.cl_int(&LabelingCoset::set_labeling(cs, n), &x);
        }
        if a.len() <= 1 {
            let mut pairs: Vec<&SetPair> = l.iter().collect();
            if let Some(&v) = a.first() {
                pairs.sort_by_key(|p| p.guide.rep().apply(v));
            }
            debug_assert!(!a.is_empty() || pairs.len() == 1);
            let mut acc = amb.clone();
            for p in &pairs {
                acc = self.cl_int(&p.payload, &acc);
            }
            for p in &pairs {
                acc = self.cl_int(&p.guide, &acc);
            }
            return acc;
        }

        if amb.group().is_invariant(a) && amb.group().is_invariant(cs) && permutes_pairs(amb.group(), l) {
            return amb.clone();
        }
        let keyed: Vec<(Vec<u8>, SetPair)> = l.iter().map(|p| (triple_key(&p.guide, a, cs), p.clone())).collect();
        if keyed.windows(2).any(|w| w[0].0 != w[1].0) {
            let mut acc = amb.clone();
            for class in ordered_partition(keyed) {
                acc = self.set_rec(&class, a, cs, &acc);
            }
            return acc;
        }

        if l[0].guide.group().orbits_within(a).len() > 1 {
            let firsts: Vec<Vec<u32>> = l.iter().map(|p| least_orbit(&p.guide, a)).collect();
            if firsts.windows(2).all(|w| w[0] == w[1]) {
                let a1 = firsts[0].clone();
                let a2 = minus(a, &a1);
                let b = union_sorted(&a1, cs);
                let bundles = bundle_by(l, |p| restriction_key(&p.guide, &b));
                if bundles.len() == l.len() {
                    return self.set_rec(l, &a1, cs, amb);
                }
                if bundles.len() == 1 {
                    return self.set_rec(l, &a2, &b, amb);
                }
                let solved = self.map(&bundles, |(_, bl)| {
                    let pi = self.set_rec(bl, &a2, &b, amb);
                    let key = pairs_key(bl, pi.rep());
                    let gamma = bl[0].guide.widen_outside(&b);
                    (key, SetPair { payload: pi, guide: gamma })
                });
                let mut acc = amb.clone();
                for class in ordered_partition(solved) {
                    acc = self.set_rec(&class, &a1, cs, &acc);
                }
                return acc;
            }
            let bundles = bundle_by(l, |p| least_orbit(&p.guide, a));
            let solved = self.map(&bundles, |(s, bl)| {
                let pi = self.set_rec(bl, a, cs, amb);
                let key = pairs_key(bl, pi.rep());
                (key, HyperPair { coset: pi, edge: s.clone() })
            });
            let all: Vec<u32> = (0..n as u32).collect();
            let mut acc = amb.clone();
            for class in ordered_partition(solved) {
                acc = self.hyper_rec(&class, &all, &acc);
            }
            return acc;
        }

        let mut refined: Vec<(Vec<u8>, SetPair)> = Vec::new();
        for p in l {
            for g in half_split_branches(&p.guide, a) {
                refined.push((restriction_key(&g, cs), SetPair { payload: p.payload.clone(), guide: g }));
            }
        }
        let groups = bundle_by_key(refined);
        let results = self.map(&groups, |li| {
            let pi = self.set_rec(li, a, cs, amb);
            (pairs_key(l, pi.rep()), pi)
        });
        span_of_minimal(results)
    }
}

/// Least label on the orbit of each point. Moving a coset by `μ` moves this
/// vector along with the points.
fn orbit_labels(c: &LabelingCoset, out: &mut Vec<u32>) {
    let rho = c.rep();
    let start = out.len();
    out.resize(start + c.degree(), 0);
    for orbit in c.group().orbits() {
        let least = orbit.iter().map(|&v| rho.apply(v)).min().unwrap();
        for v in orbit {
            out[start + v as usize] = least;
        }
    }
}

/// Whether every element of `g` permutes the pairs, so that `Δρ` is already
/// canonical.
fn permutes_pairs(g: &PermutationGroup, l: &[SetPair]) -> bool {
    if g.is_trivial() {
        return true;
    }
    let n = g.degree();
    let keys: Vec<Vec<u32>> = l
        .iter()
        .map(|p| {
            let mut k = Vec::with_capacity(2 * n);
            orbit_labels(&p.payload, &mut k);
            orbit_labels(&p.guide, &mut k);
            k
        })
        .collect();
    let mut index: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (i, k) in keys.iter().enumerate() {
        index.entry(k.as_slice()).or_default().push(i);
    }
    let mut moved = vec![0u32; 2 * n];
    g.generators().iter().all(|d| {
        l.iter().zip(&keys).all(|(p, k)| {
            for v in 0..n {
                let w = d.apply(v as u32) as usize;
                moved[w] = k[v];
                moved[n + w] = k[n + v];
            }
            index.get(moved.as_slice()).is_some_and(|c| {
                c.iter().any(|&j| p.payload.maps_onto(d, &l[j].payload) && p.guide.maps_onto(d, &l[j].guide))
            })
        })
    })
}

fn bundle_by_key(items: Vec<(Vec<u8>, SetPair)>) -> Vec<Vec<SetPair>> {
    let mut out: Vec<(Vec<u8>, Vec<SetPair>)> = Vec::new();
    for (k, p) in items {
        match out.iter_mut().find(|(x, _)| *x == k) {
            Some((_, b)) => b.push(p),
            None => out.push((k, vec![p])),
        }
    }
    out.into_iter().map(|(_, v)| v).collect()
}
