#![allow(dead_code)]

use std::sync::Arc;

use hfcanon::canon::HyperPair;
use hfcanon::{Code, GroundSet, LabelingCoset, NodeId, Object, ObjectDag, Perm, PermutationGroup};
use rand::seq::SliceRandom;
use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as TestRng;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub fn perm(rng: &mut TestRng, n: usize) -> Perm {
    let mut v: Vec<u32> = (0..n as u32).collect();
    v.shuffle(rng);
    Perm::from_images(v).unwrap()
}

pub fn subset(rng: &mut TestRng, n: usize, p: f64) -> Vec<u32> {
    (0..n as u32).filter(|_| rng.gen_bool(p)).collect()
}

/// Trivial, full, Young, cyclic, or generated by a couple of random elements.
pub fn group(rng: &mut TestRng, n: usize) -> PermutationGroup {
    match rng.gen_range(0..6) {
        0 => PermutationGroup::trivial(n),
        1 => PermutationGroup::symmetric(n),
        2 => {
            let mut pts: Vec<u32> = (0..n as u32).collect();
            pts.shuffle(rng);
            let mut blocks = Vec::new();
            while !pts.is_empty() {
                let k = rng.gen_range(1..=pts.len());
                blocks.push(pts.drain(..k).collect::<Vec<_>>());
            }
            PermutationGroup::symmetric_blocks(n, &blocks).unwrap()
        }
        3 => PermutationGroup::from_generators(n, &[perm(rng, n)]).unwrap(),
        4 => {
            let k = rng.gen_range(1..=2);
            let gens: Vec<Perm> = (0..k).map(|_| perm(rng, n)).collect();
            PermutationGroup::from_generators(n, &gens).unwrap()
        }
        _ => {
            let gens: Vec<Perm> = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let (a, b) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
                    if a == b || n < 2 {
                        Perm::identity(n)
                    } else {
                        Perm::transposition(n, a, b)
                    }
                })
                .collect();
            PermutationGroup::from_generators(n, &gens).unwrap()
        }
    }
}

pub fn coset(rng: &mut TestRng, n: usize) -> LabelingCoset {
    let g = group(rng, n);
    LabelingCoset::new(Arc::new(g), perm(rng, n)).unwrap()
}

/// A small coset: trivial or cyclic group, so objects stay cheap to brute force.
pub fn small_coset(rng: &mut TestRng, n: usize) -> LabelingCoset {
    let g = if rng.gen_bool(0.5) {
        PermutationGroup::trivial(n)
    } else {
        PermutationGroup::from_generators(n, &[perm(rng, n)]).unwrap()
    };
    LabelingCoset::new(Arc::new(g), perm(rng, n)).unwrap()
}

/// Union of a random selection of orbits of `g`.
pub fn invariant_subset(rng: &mut TestRng, g: &PermutationGroup) -> Vec<u32> {
    let mut a: Vec<u32> = g.orbits().into_iter().filter(|_| rng.gen_bool(0.6)).flatten().collect();
    a.sort_unstable();
    a
}

/// A matching from the complement of `a` into `a`.
pub fn matching(rng: &mut TestRng, n: usize, a: &[u32]) -> Vec<(u32, u32)> {
    let mut firsts: Vec<u32> = (0..n as u32).filter(|v| a.binary_search(v).is_err()).collect();
    let mut seconds = a.to_vec();
    firsts.shuffle(rng);
    seconds.shuffle(rng);
    let k = rng.gen_range(0..=firsts.len().min(seconds.len()));
    firsts.into_iter().zip(seconds).take(k).collect()
}

/// Pairs whose edges differ inside `a`.
pub fn hyper_pairs(rng: &mut TestRng, n: usize, a: &[u32], max: usize, big_cosets: bool) -> Vec<HyperPair> {
    let mut out: Vec<HyperPair> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for _ in 0..rng.gen_range(0..=max) {
        let edge = subset(rng, n, 0.5);
        let inner: Vec<u32> = edge.iter().copied().filter(|v| a.binary_search(v).is_ok()).collect();
        if seen.insert(inner) {
            let coset = if big_cosets { coset(rng, n) } else if rng.gen_bool(0.5) { LabelingCoset::full(n) } else { small_coset(rng, n) };
            out.push(HyperPair { coset, edge });
        }
    }
    out
}

pub fn map_pairs(k: &[HyperPair], phi: &Perm) -> Vec<HyperPair> {
    k.iter()
        .map(|p| {
            let mut edge: Vec<u32> = p.edge.iter().map(|&v| phi.apply(v)).collect();
            edge.sort_unstable();
            HyperPair { coset: p.coset.apply_map(phi), edge }
        })
        .collect()
}

pub fn map_set(a: &[u32], phi: &Perm) -> Vec<u32> {
    let mut s: Vec<u32> = a.iter().map(|&v| phi.apply(v)).collect();
    s.sort_unstable();
    s
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{}", i)).collect()
}

/// A random object of bounded depth over `n` named points.
pub fn object(rng: &mut TestRng, n: usize, depth: usize, cosets: bool) -> Object {
    let mut dag = ObjectDag::new(n);
    let root = node(rng, &mut dag, n, depth, cosets);
    Object::new(GroundSet::named(names(n)).unwrap(), dag, root).unwrap()
}

/// A random object over `{1..n}`.
pub fn ordered_object(rng: &mut TestRng, n: usize, depth: usize) -> Object {
    let mut dag = ObjectDag::new(n);
    let root = node(rng, &mut dag, n, depth, true);
    Object::new(GroundSet::ordered(n), dag, root).unwrap()
}

fn node(rng: &mut TestRng, dag: &mut ObjectDag, n: usize, depth: usize, cosets: bool) -> NodeId {
    let atom = depth == 0 || rng.gen_bool(0.25);
    if atom {
        if n > 0 && (!cosets || rng.gen_bool(0.8)) {
            return dag.vertex(rng.gen_range(0..n as u32)).unwrap();
        }
        if n == 0 {
            return dag.empty_set();
        }
        return dag.coset(small_coset(rng, n)).unwrap();
    }
    let k = rng.gen_range(0..=3);
    let ch: Vec<NodeId> = (0..k).map(|_| node(rng, dag, n, depth - 1, cosets)).collect();
    if rng.gen_bool(0.6) {
        dag.set(ch)
    } else {
        dag.tuple(ch)
    }
}

pub fn code(rng: &mut TestRng, n: usize, words: usize, q: usize) -> Code {
    Code {
        positions: n,
        alphabet: (0..q).map(|i| i.to_string()).collect(),
        words: (0..words).map(|_| (0..n).map(|_| rng.gen_range(0..q as u32)).collect()).collect(),
    }
}

pub fn random_code(rng: &mut TestRng, n: usize) -> Code {
    let words = rng.gen_range(0..=8);
    let q = rng.gen_range(1..=3);
    code(rng, n, words, q)
}

/// The code with positions renamed: position `v` moves to `phi(v)`.
pub fn map_code(c: &Code, phi: &Perm) -> Code {
    let words = c
        .words
        .iter()
        .map(|w| {
            let mut out = vec![0; w.len()];
            for (v, &s) in w.iter().enumerate() {
                out[phi.apply(v as u32) as usize] = s;
            }
            out
        })
        .collect();
    Code { positions: c.positions, alphabet: c.alphabet.clone(), words }
}

/// Brute-force test of `X^δ = X` for every element of `g`.
pub fn filter_group(g: &PermutationGroup, keep: impl Fn(&Perm) -> bool) -> Vec<Perm> {
    let mut v: Vec<Perm> = g.elements(1_000_000).unwrap().into_iter().filter(|p| keep(p)).collect();
    v.sort();
    v
}

pub fn sorted_elements(g: &PermutationGroup) -> Vec<Perm> {
    let mut v = g.elements(1_000_000).unwrap();
    v.sort();
    v
}

/// All edge sets of a hypergraph over `n` points, as bitmasks over subsets.
pub fn hyper_from_mask(n: usize, mask: u64) -> Vec<Vec<u32>> {
    (0..1u32 << n)
        .filter(|s| mask >> s & 1 == 1)
        .map(|s| (0..n as u32).filter(|v| s >> v & 1 == 1).collect())
        .collect()
}

/// Least relabeled mask over all permutations; an isomorphism invariant that
/// separates non-isomorphic hypergraphs.
pub fn brute_hyper_class(n: usize, mask: u64, perms: &[Vec<u32>]) -> u64 {
    let mut best = u64::MAX;
    for p in perms {
        let mut m = 0u64;
        for s in 0..1u32 << n {
            if mask >> s & 1 == 1 {
                let mut t = 0u32;
                for v in 0..n {
                    if s >> v & 1 == 1 {
                        t |= 1 << p[v];
                    }
                }
                m |= 1 << t;
            }
        }
        best = best.min(m);
    }
    best
}

pub fn all_perm_arrays(n: usize) -> Vec<Vec<u32>> {
    hfcanon::oracle::all_perms(n).map(|p| p.images().to_vec()).collect()
}
