use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::{factorial, PermutationGroup};
use crate::perm::Perm;

/// A labeling coset `Δρ`: the bijections `v ↦ ρ(δ(v))` for `δ` in `Δ`.
///
/// Points of the ground set are positions `0..n`; labels are `0..n` as well
/// (one less than the 1-based labels used at the interfaces). `Δ` acts on
/// positions and is applied before `ρ`.
#[derive(Clone)]
pub struct LabelingCoset {
    group: Arc<PermutationGroup>,
    rep: Perm,
}

impl fmt::Debug for LabelingCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coset(|Δ|={}, gens={:?}, ρ={:?})", self.group.order(), self.group.generators(), self.rep.images())
    }
}

impl PartialEq for LabelingCoset {
    fn eq(&self, other: &Self) -> bool {
        self.degree() == other.degree()
            && self.group.order() == other.group.order()
            && other.contains(&self.rep)
            && self.group.is_subgroup_of(&other.group)
    }
}

impl Eq for LabelingCoset {}

impl LabelingCoset {
    pub fn new(group: Arc<PermutationGroup>, rep: Perm) -> Result<Self> {
        if group.degree() != rep.len() {
            return Err(Error::DomainMismatch(format!(
                "group of degree {} with a labeling of length {}",
                group.degree(),
                rep.len()
            )));
        }
        Ok(LabelingCoset { group, rep })
    }

    pub(crate) fn from_parts(group: Arc<PermutationGroup>, rep: Perm) -> Self {
        debug_assert_eq!(group.degree(), rep.len());
        LabelingCoset { group, rep }
    }

    /// `Label(V)`: every bijection onto `0..n`.
    pub fn full(n: usize) -> Self {
        LabelingCoset { group: Arc::new(PermutationGroup::symmetric(n)), rep: Perm::identity(n) }
    }

    pub fn singleton(rep: Perm) -> Self {
        LabelingCoset { group: Arc::new(PermutationGroup::trivial(rep.len())), rep }
    }

    pub fn degree(&self) -> usize {
        self.rep.len()
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<PermutationGroup> {
        &self.group
    }

    pub fn rep(&self) -> &Perm {
        &self.rep
    }

    pub fn size(&self) -> &BigUint {
        self.group.order()
    }

    pub fn contains(&self, lambda: &Perm) -> bool {
        lambda.len() == self.degree() && self.group.contains(&lambda.then(&self.rep.inverse()))
    }

    /// Image under a bijection `mu` of positions: the coset `mu^-1 Δ ρ`.
    pub fn apply_map(&self, mu: &Perm) -> LabelingCoset {
        LabelingCoset {
            group: Arc::new(self.group.conjugate(mu)),
            rep: mu.inverse().then(&self.rep),
        }
    }

    /// Whether `self.apply_map(mu) == other`, without building the image.
    pub(crate) fn maps_onto(&self, mu: &Perm, other: &LabelingCoset) -> bool {
        let mu_inv = mu.inverse();
        self.group.order() == other.group.order()
            && other.contains(&mu_inv.then(&self.rep))
            && self.group.generators().iter().all(|g| other.group.contains(&mu.conjugating(g)))
    }

    /// The subcoset `Stab_Δ(sets) ρ'` where `t` is an element of `Δ` applied before `ρ`.
    pub(crate) fn subcoset(&self, group: PermutationGroup, t: &Perm) -> LabelingCoset {
        LabelingCoset { group: Arc::new(group), rep: t.then(&self.rep) }
    }

    /// Restriction to a `Δ`-invariant sorted subset `sub`, with the labels of
    /// `sub` renumbered order-preservingly onto `0..sub.len()`.
    pub fn induce(&self, sub: &[u32]) -> Result<LabelingCoset> {
        check_sorted_subset(sub, self.degree())?;
        if !self.group.is_invariant(sub) {
            return Err(Error::NotInvariant(format!("{:?}", sub)));
        }
        Ok(self.induce_unchecked(sub, false))
    }

    pub(crate) fn induce_unchecked(&self, sub: &[u32], injective: bool) -> LabelingCoset {
        let group = self.group.restrict(sub, injective);
        let mut labels: Vec<u32> = sub.iter().map(|&v| self.rep.apply(v)).collect();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        for l in labels.iter_mut() {
            *l = sorted.binary_search(l).unwrap() as u32;
        }
        LabelingCoset { group: Arc::new(group), rep: Perm::from_images_unchecked(labels) }
    }

    /// Extends a coset over the sorted subset `sub` of `0..n`: the group gains
    /// the symmetric group on the complement, and the representative sends the
    /// complement, in position order, to `sub.len()..n`.
    pub fn lift(inner: &LabelingCoset, sub: &[u32], n: usize) -> Result<LabelingCoset> {
        check_sorted_subset(sub, n)?;
        if inner.degree() != sub.len() {
            return Err(Error::DomainMismatch("lifted coset and subset differ in size".into()));
        }
        let mut in_sub = vec![false; n];
        for &v in sub {
            in_sub[v as usize] = true;
        }
        let rest: Vec<u32> = (0..n as u32).filter(|&v| !in_sub[v as usize]).collect();
        let mut rep = vec![0u32; n];
        for (k, &v) in sub.iter().enumerate() {
            rep[v as usize] = inner.rep.apply(k as u32);
        }
        for (k, &v) in rest.iter().enumerate() {
            rep[v as usize] = (sub.len() + k) as u32;
        }
        let group = lift_group(inner.group(), sub, &rest, n);
        Ok(LabelingCoset { group: Arc::new(group), rep: Perm::from_images_unchecked(rep) })
    }

    /// `Label(S)↑V`: bijections sending `S` onto `0..|S|`.
    pub fn set_labeling(set: &[u32], n: usize) -> LabelingCoset {
        let mut mark = vec![false; n];
        for &v in set {
            mark[v as usize] = true;
        }
        let mut rep = vec![0u32; n];
        let mut next_in = 0u32;
        let mut next_out = set.len() as u32;
        let mut cells = vec![0u32; n];
        let first_in = (0..n as u32).find(|&v| mark[v as usize]);
        let first_out = (0..n as u32).find(|&v| !mark[v as usize]);
        for v in 0..n {
            if mark[v] {
                rep[v] = next_in;
                next_in += 1;
                cells[v] = first_in.unwrap();
            } else {
                rep[v] = next_out;
                next_out += 1;
                cells[v] = first_out.unwrap();
            }
        }
        LabelingCoset {
            group: Arc::new(PermutationGroup::from_cells(cells)),
            rep: Perm::from_images_unchecked(rep),
        }
    }

    /// Least element in the lexicographic order of image arrays.
    pub fn lexmin_element(&self) -> Perm {
        self.group.lexmin_coset(&self.rep)
    }

    /// The canonical strong generating set of the group and the least element.
    pub fn canonical_generators(&self) -> (Vec<Perm>, Perm) {
        (self.group.canonical_generators().to_vec(), self.lexmin_element())
    }

    /// Total order on cosets over an ordered ground set: smaller cosets first,
    /// then the least element of the symmetric difference decides.
    pub fn compare(&self, other: &LabelingCoset) -> Ordering {
        match self.size().cmp(other.size()) {
            Ordering::Equal => {}
            o => return o,
        }
        let a = self.group.min_coset_difference(&self.rep, &other.group, &other.rep);
        let Some(a) = a else { return Ordering::Equal };
        let b = other
            .group
            .min_coset_difference(&other.rep, &self.group, &self.rep)
            .expect("equal-size cosets with a one-sided difference");
        a.cmp(&b)
    }

    /// The smallest coset containing all given cosets: group generated by all
    /// groups and the quotients `ρ_i ρ_1^-1`, representative `ρ_1`.
    pub fn span(cosets: &[LabelingCoset]) -> Result<LabelingCoset> {
        let first = cosets.first().ok_or_else(|| Error::Precondition("span of no cosets".into()))?;
        if cosets.len() == 1 {
            return Ok(first.clone());
        }
        let n = first.degree();
        let inv = first.rep.inverse();
        let mut gens: Vec<Perm> = Vec::new();
        for c in cosets {
            if c.degree() != n {
                return Err(Error::DomainMismatch("span over cosets of different degree".into()));
            }
            gens.extend(c.group.generators().iter().cloned());
            let q = c.rep.then(&inv);
            if !q.is_identity() {
                gens.push(q);
            }
        }
        let biggest = cosets.iter().map(|c| &c.group).max_by(|a, b| a.order().cmp(b.order())).unwrap();
        let group = if gens.iter().all(|g| biggest.contains(g)) {
            biggest.clone()
        } else {
            Arc::new(PermutationGroup::from_generators(n, &gens)?)
        };
        Ok(LabelingCoset { group, rep: first.rep.clone() })
    }
}

impl LabelingCoset {
    /// `{γ : γ restricted to sub lies in self restricted to sub}`, with labels kept.
    pub(crate) fn widen_outside(&self, sub: &[u32]) -> LabelingCoset {
        let n = self.degree();
        let mut in_sub = vec![false; n];
        let mut used = vec![false; n];
        for &v in sub {
            in_sub[v as usize] = true;
            used[self.rep.apply(v) as usize] = true;
        }
        let rest: Vec<u32> = (0..n as u32).filter(|&v| !in_sub[v as usize]).collect();
        let mut free = (0..n as u32).filter(|&l| !used[l as usize]);
        let mut rep = vec![0u32; n];
        for v in 0..n {
            rep[v] = if in_sub[v] { self.rep.apply(v as u32) } else { free.next().unwrap() };
        }
        let inner = self.group.restrict(sub, false);
        let group = lift_group(&inner, sub, &rest, n);
        LabelingCoset { group: Arc::new(group), rep: Perm::from_images_unchecked(rep) }
    }
}

fn check_sorted_subset(sub: &[u32], n: usize) -> Result<()> {
    if sub.windows(2).any(|w| w[0] >= w[1]) || sub.last().is_some_and(|&x| x as usize >= n) {
        return Err(Error::Invalid(format!("{:?} is not a sorted subset of 0..{}", sub, n)));
    }
    Ok(())
}

fn lift_group(inner: &PermutationGroup, sub: &[u32], rest: &[u32], n: usize) -> PermutationGroup {
    if let Some(cells) = inner.cells() {
        let mut out = vec![0u32; n];
        for (k, &v) in sub.iter().enumerate() {
            out[v as usize] = sub[cells[k] as usize];
        }
        if let Some(&r0) = rest.first() {
            for &v in rest {
                out[v as usize] = r0;
            }
        }
        return PermutationGroup::from_cells(out);
    }
    let mut gens: Vec<Perm> = inner
        .generators()
        .iter()
        .map(|g| {
            let mut images: Vec<u32> = (0..n as u32).collect();
            for (k, &v) in sub.iter().enumerate() {
                images[v as usize] = sub[g.apply(k as u32) as usize];
            }
            Perm::from_images_unchecked(images)
        })
        .collect();
    for w in rest.windows(2) {
        gens.push(Perm::transposition(n, w[0], w[1]));
    }
    let order = inner.order() * factorial(rest.len());
    PermutationGroup::with_known_order(n, gens, &order)
}
