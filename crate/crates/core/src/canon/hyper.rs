use std::collections::HashMap;
use std::sync::atomic::Ordering::Relaxed;

use super::key::{coset_image, int_set, push_ints, push_set};
use super::{int_set_cmp, ordered_partition, span_of_minimal, Canonizer, HyperPair};
use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::perm::Perm;

/// Key of the ordered image of a set of pairs under `lambda`.
pub(crate) fn hyper_key(k: &[HyperPair], lambda: &Perm) -> Vec<u8> {
    let items = k
        .iter()
        .map(|p| {
            let mut it = coset_image(&p.coset, lambda);
            push_ints(&mut it, &int_set(lambda, &p.edge));
            it
        })
        .collect();
    let mut out = Vec::new();
    push_set(&mut out, items);
    out
}

fn intersect(edge: &[u32], mark: &[bool]) -> Vec<u32> {
    edge.iter().copied().filter(|&v| mark[v as usize]).collect()
}

impl Canonizer {
    /// Canonical labeling of a set of pairs `(Δ_iρ_i, S_i)` with respect to
    /// `Δρ`, recursing on the `Δ`-invariant focus `a`. The sets `S_i ∩ a`
    /// must be pairwise distinct.
    pub fn cl_hyper(&self, k: &[HyperPair], a: &[u32], c: &LabelingCoset) -> Result<LabelingCoset> {
        let n = c.degree();
        let mut mark = vec![false; n];
        for &v in a {
            mark[v as usize] = true;
        }
        let mut seen = std::collections::HashSet::new();
        for p in k {
            if p.coset.degree() != n || p.edge.iter().any(|&v| v as usize >= n) {
                return Err(Error::DomainMismatch("pair over a different ground set".into()));
            }
            if !seen.insert(intersect(&p.edge, &mark)) {
                return Err(Error::Precondition("edges must differ inside the focus".into()));
            }
        }
        if !c.group().is_invariant(a) {
            return Err(Error::NotInvariant("focus of the hypergraph recursion".into()));
        }
        Ok(self.hyper_rec(k, a, c))
    }

    pub(crate) fn hyper_rec(&self, k: &[HyperPair], a: &[u32], c: &LabelingCoset) -> LabelingCoset {
        self.counters.hyper.fetch_add(1, Relaxed);
        let n = c.degree();
        if k.is_empty() {
            return c.clone();
        }
        if a.len() <= 1 || k.len() == 1 {
            let mut pairs: Vec<&HyperPair> = k.iter().collect();
            pairs.sort_by_key(|p| a.iter().filter(|v| p.edge.binary_search(v).is_ok()).count());
            assert!(pairs.len() <= 2, "edges must differ inside the focus");
            let mut acc = c.clone();
            for p in pairs {
                acc = self.cl_int(&p.coset, &acc);
                acc = self.cl_int(&LabelingCoset::set_labeling(&p.edge, n), &acc);
            }
            return acc;
        }
        if permutes_pairs(c.group(), k) {
            return c.clone();
        }
        let keyed: Vec<((usize, usize, Vec<u8>), HyperPair)> = k
            .iter()
            .map(|p| {
                let inner = a.iter().filter(|v| p.edge.binary_search(v).is_ok()).count();
                ((inner, p.edge.len(), p.coset.group().order().to_bytes_be()), p.clone())
            })
            .collect();
        if keyed.windows(2).any(|w| w[0].0 != w[1].0) {
            let mut acc = c.clone();
            for class in ordered_partition(keyed) {
                acc = self.hyper_rec(&class, a, &acc);
            }
            return acc;
        }
        if let Some(r) = refine(c, k) {
            return self.hyper_rec(k, a, &r);
        }
        let orbits = c.group().orbits_within(a);
        if orbits.len() > 1 {
            let rho = c.rep();
            let a1 = orbits
                .iter()
                .min_by(|x, y| int_set_cmp(&int_set(rho, x), &int_set(rho, y)))
                .unwrap()
                .clone();
            let mut in_a1 = vec![false; n];
            for &v in &a1 {
                in_a1[v as usize] = true;
            }
            let a2: Vec<u32> = a.iter().copied().filter(|&v| !in_a1[v as usize]).collect();
            let mut bundles: Vec<(Vec<u32>, Vec<HyperPair>)> = Vec::new();
            for p in k {
                let r = intersect(&p.edge, &in_a1);
                match bundles.iter_mut().find(|(s, _)| *s == r) {
                    Some((_, b)) => b.push(p.clone()),
                    None => bundles.push((r, vec![p.clone()])),
                }
            }
            if bundles.len() == k.len() {
                return self.hyper_rec(k, &a1, c);
            }
            if bundles.len() == 1 {
                return self.hyper_rec(k, &a2, c);
            }
            let solved = self.map(&bundles, |(r, b)| {
                let t = self.hyper_rec(b, &a2, c);
                let key = hyper_key(b, t.rep());
                (key, HyperPair { coset: t, edge: r.clone() })
            });
            let mut acc = c.clone();
            for class in ordered_partition(solved) {
                acc = self.hyper_rec(&class, &a1, &acc);
            }
            return acc;
        }
        if k[0].coset.group().is_trivial() {
            // Fixing any one pair leaves a single labeling, so branch on the
            // pairs rather than on halves of the focus.
            let results = self.map(k, |p| {
                let x = self.cl_int(&p.coset, c);
                let l = self.hyper_rec(k, a, &self.cl_int(&LabelingCoset::set_labeling(&p.edge, n), &x));
                (hyper_key(k, l.rep()), l)
            });
            return span_of_minimal(results);
        }
        let branches = super::base::half_split_branches(c, a);
        let results = self.map(&branches, |sub| {
            let l = self.hyper_rec(k, a, sub);
            (hyper_key(k, l.rep()), l)
        });
        span_of_minimal(results)
    }

    /// Canonical labeling of a hypergraph whose vertices carry colors; the
    /// color classes are listed in their canonical order and labels respect it.
    pub fn cl_colored_hypergraph(&self, n: usize, edges: &[Vec<u32>], colors: &[Vec<u32>]) -> Result<LabelingCoset> {
        let c = color_coset(n, colors)?;
        let full = LabelingCoset::full(n);
        let mut k: Vec<HyperPair> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for e in edges {
            let mut e = e.clone();
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) || e.last().is_some_and(|&v| v as usize >= n) {
                return Err(Error::Invalid(format!("edge {:?} is not a subset of the vertices", e)));
            }
            if seen.insert(e.clone()) {
                k.push(HyperPair { coset: full.clone(), edge: e });
            }
        }
        let a: Vec<u32> = (0..n as u32).collect();
        self.cl_hyper(&k, &a, &c)
    }
}

/// Whether every element of `g` permutes the pairs, so that `Δρ` is already
/// canonical.
fn permutes_pairs(g: &PermutationGroup, k: &[HyperPair]) -> bool {
    let index: HashMap<&[u32], usize> = k.iter().enumerate().map(|(i, p)| (p.edge.as_slice(), i)).collect();
    g.generators().iter().all(|d| {
        k.iter().all(|p| {
            let img = int_set(d, &p.edge);
            index.get(img.as_slice()).is_some_and(|&j| p.coset.maps_onto(d, &k[j].coset))
        })
    })
}

/// Split the points by iterated degree, starting from the orbits of `Δ` and
/// ordering the parts by signature. Every automorphism of the pairs in `Δρ`
/// respects the parts, so restricting to labelings that do is canonical.
/// For a Young group all parts are fixed at once; otherwise the least part
/// that is not yet invariant is sent to its least labeled image. `None` if
/// every part is already invariant.
fn refine(c: &LabelingCoset, k: &[HyperPair]) -> Option<LabelingCoset> {
    let g = c.group();
    let n = c.degree();
    let rho = c.rep();
    let mut color = vec![0u32; n];
    for orbit in g.orbits() {
        let least = orbit.iter().map(|&v| rho.apply(v)).min().unwrap();
        for v in orbit {
            color[v as usize] = least;
        }
    }
    let orbits = rank(&mut color);
    let classes = refine_colors(&mut color, k, orbits);
    if classes == orbits {
        return None;
    }
    if let Some(cells) = g.cells() {
        return Some(young_parts(cells, rho, &color));
    }
    for x in 0..classes as u32 {
        let part: Vec<u32> = (0..n as u32).filter(|&v| color[v as usize] == x).collect();
        if g.is_invariant(&part) {
            continue;
        }
        let stab = g.setwise_stabilizer(&part);
        return g
            .set_orbit(&part)
            .into_iter()
            .map(|(_, t)| c.subcoset(stab.clone(), &t))
            .min_by(|x, y| int_set_cmp(&int_set(x.rep(), &part), &int_set(y.rep(), &part)));
    }
    None
}

/// Colour refinement of the points against the edges; returns the number of
/// colours. Colours stay ranks of signatures, so they are relabeling invariant.
fn refine_colors(color: &mut [u32], k: &[HyperPair], mut classes: usize) -> usize {
    loop {
        let mut sig: Vec<Vec<u32>> = color.iter().map(|&x| vec![x]).collect();
        let edge_sigs: Vec<Vec<u32>> = k
            .iter()
            .map(|p| {
                let mut m: Vec<u32> = p.edge.iter().map(|&v| color[v as usize]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        let mut sorted: Vec<&Vec<u32>> = edge_sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        for (p, e) in k.iter().zip(&edge_sigs) {
            let r = sorted.binary_search(&e).unwrap() as u32;
            for &v in &p.edge {
                sig[v as usize].push(r + 1);
            }
        }
        for s in &mut sig {
            s[1..].sort_unstable();
        }
        let mut sorted: Vec<&Vec<u32>> = sig.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next = sorted.len();
        for (c, s) in color.iter_mut().zip(&sig) {
            *c = sorted.binary_search(&s).unwrap() as u32;
        }
        if next == classes {
            return classes;
        }
        classes = next;
    }
}

/// The Young coset inside a Young coset whose cells are the colour classes,
/// each cell handing its labels to its classes in colour order.
fn young_parts(cells: &[u32], rho: &Perm, color: &[u32]) -> LabelingCoset {
    let n = cells.len();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n as u32 {
        members[cells[v as usize] as usize].push(v);
    }
    let mut images = vec![0u32; n];
    for block in members.iter().filter(|b| !b.is_empty()) {
        let mut labels: Vec<u32> = block.iter().map(|&v| rho.apply(v)).collect();
        labels.sort_unstable();
        let mut pts = block.clone();
        pts.sort_unstable_by_key(|&v| (color[v as usize], rho.apply(v)));
        for (&v, &x) in pts.iter().zip(&labels) {
            images[v as usize] = x;
        }
    }
    let mut least = vec![u32::MAX; n];
    for (v, &c) in color.iter().enumerate() {
        least[c as usize] = least[c as usize].min(v as u32);
    }
    let meet: Vec<u32> = color.iter().map(|&c| least[c as usize]).collect();
    LabelingCoset::from_parts(PermutationGroup::from_cells(meet).into(), Perm::from_images_unchecked(images))
}

/// Replace values by their rank among the distinct values; returns the count.
fn rank(xs: &mut [u32]) -> usize {
    let mut d = xs.to_vec();
    d.sort_unstable();
    d.dedup();
    for x in xs.iter_mut() {
        *x = d.binary_search(x).unwrap() as u32;
    }
    d.len()
}

/// Labelings sending the `i`-th color class onto the `i`-th block of labels.
pub fn color_coset(n: usize, colors: &[Vec<u32>]) -> Result<LabelingCoset> {
    let mut rep = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut blocks = Vec::new();
    for class in colors {
        let mut class = class.clone();
        class.sort_unstable();
        for &v in &class {
            if v as usize >= n || rep[v as usize] != u32::MAX {
                return Err(Error::Invalid(format!("color classes must partition the vertices (at {})", v)));
            }
            rep[v as usize] = next;
            next += 1;
        }
        blocks.push(class);
    }
    if colors.is_empty() {
        return Ok(LabelingCoset::full(n));
    }
    if next as usize != n {
        return Err(Error::Invalid("color classes must cover every vertex".into()));
    }
    let group = PermutationGroup::symmetric_blocks(n, &blocks)?;
    LabelingCoset::new(group.into(), Perm::from_images(rep)?)
}
