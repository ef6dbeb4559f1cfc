//! Brute-force references: everything here enumerates labelings or group
//! elements outright and refuses inputs beyond its budget.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::object::{structural_bytes, Object};
use crate::perm::Perm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest `n` for which all `n!` labelings may be enumerated.
    pub max_factorial_base: usize,
    /// Largest group or coset enumerated element by element.
    pub max_elements: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_factorial_base: 8, max_elements: 100_000 }
    }
}

impl OracleBudget {
    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.max_factorial_base {
            return Err(Error::BudgetExceeded(format!(
                "{} points exceed the brute-force limit of {}",
                n, self.max_factorial_base
            )));
        }
        Ok(())
    }

    fn check_order(&self, order: &BigUint) -> Result<()> {
        if *order > BigUint::from(self.max_elements) {
            return Err(Error::BudgetExceeded(format!(
                "{} elements exceed the enumeration limit of {}",
                order, self.max_elements
            )));
        }
        Ok(())
    }
}

/// All permutations of `0..n` in lexicographic order of their image arrays.
pub fn all_perms(n: usize) -> impl Iterator<Item = Perm> {
    let mut cur: Option<Vec<u32>> = Some((0..n as u32).collect());
    std::iter::from_fn(move || {
        let out = cur.take()?;
        let mut next = out.clone();
        if let Some(i) = (1..n).rev().find(|&i| next[i - 1] < next[i]) {
            let j = (i..n).rev().find(|&j| next[j] > next[i - 1]).unwrap();
            next.swap(i - 1, j);
            next[i..].reverse();
            cur = Some(next);
        }
        Some(Perm::from_images_unchecked(out))
    })
}

/// The `≺`-least image of `obj` over all labelings in `c`, with the first
/// labeling reaching it.
pub fn brute_canonical_labeling_in(obj: &Object, c: &LabelingCoset, budget: &OracleBudget) -> Result<(Perm, Object)> {
    budget.check_order(c.size())?;
    let elems = c.group().elements(budget.max_elements).expect("order checked");
    let mut best: Option<(Perm, Object)> = None;
    for d in elems {
        let lambda = d.then(c.rep());
        let img = obj.image(&lambda)?;
        let better = match &best {
            None => true,
            Some((bl, b)) => match img.ordered_compare(b)? {
                Ordering::Less => true,
                Ordering::Equal => lambda < *bl,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((lambda, img));
        }
    }
    Ok(best.expect("a coset is never empty"))
}

pub fn brute_canonical_labeling(obj: &Object, budget: &OracleBudget) -> Result<(Perm, Object)> {
    budget.check_degree(obj.degree())?;
    let n = obj.degree();
    let mut best: Option<(Perm, Object)> = None;
    for lambda in all_perms(n) {
        let img = obj.image(&lambda)?;
        let better = match &best {
            None => true,
            Some((_, b)) => img.ordered_compare(b)? == Ordering::Less,
        };
        if better {
            best = Some((lambda, img));
        }
    }
    Ok(best.expect("Sym(n) is never empty"))
}

/// The `≺`-least ordered object among all images of `obj`.
pub fn brute_canonical_form(obj: &Object, budget: &OracleBudget) -> Result<Object> {
    Ok(brute_canonical_labeling(obj, budget)?.1)
}

fn group_from_elements(n: usize, elems: &[Perm]) -> Result<PermutationGroup> {
    let mut g = PermutationGroup::trivial(n);
    for p in elems {
        if !g.contains(p) {
            let mut gens = g.generators().to_vec();
            gens.push(p.clone());
            g = PermutationGroup::from_generators(n, &gens)?;
        }
    }
    Ok(g)
}

/// `{σ ∈ G : X^σ = X}` element by element.
pub fn brute_aut_elements_in(obj: &Object, g: &PermutationGroup, budget: &OracleBudget) -> Result<Vec<Perm>> {
    budget.check_order(g.order())?;
    let own = structural_bytes(obj.dag(), obj.root());
    let mut out = Vec::new();
    for s in g.elements(budget.max_elements).expect("order checked") {
        let img = obj.apply_map(&s, obj.ground().clone())?;
        if structural_bytes(img.dag(), img.root()) == own {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

/// `{σ ∈ Sym(V) : X^σ = X}` by running through all of `Sym(V)`.
pub fn brute_aut(obj: &Object, budget: &OracleBudget) -> Result<PermutationGroup> {
    budget.check_degree(obj.degree())?;
    let own = structural_bytes(obj.dag(), obj.root());
    let mut elems = Vec::new();
    for s in all_perms(obj.degree()) {
        let img = obj.apply_map(&s, obj.ground().clone())?;
        if structural_bytes(img.dag(), img.root()) == own {
            elems.push(s);
        }
    }
    group_from_elements(obj.degree(), &elems)
}

/// The elements of `t ∩ c`, sorted.
pub fn brute_coset_intersection(t: &LabelingCoset, c: &LabelingCoset, budget: &OracleBudget) -> Result<Vec<Perm>> {
    if t.degree() != c.degree() {
        return Err(Error::DomainMismatch("cosets over different ground sets".into()));
    }
    budget.check_order(t.size())?;
    let mut out: Vec<Perm> = t
        .group()
        .elements(budget.max_elements)
        .expect("order checked")
        .into_iter()
        .map(|d| d.then(t.rep()))
        .filter(|x| c.contains(x))
        .collect();
    out.sort();
    Ok(out)
}

/// The elements of `G` mapping `a` onto itself, sorted.
pub fn brute_setwise_stab(g: &PermutationGroup, a: &[u32], budget: &OracleBudget) -> Result<Vec<Perm>> {
    budget.check_order(g.order())?;
    let mut inside = vec![false; g.degree()];
    for &v in a {
        inside[v as usize] = true;
    }
    let mut out: Vec<Perm> = g
        .elements(budget.max_elements)
        .expect("order checked")
        .into_iter()
        .filter(|p| a.iter().all(|&v| inside[p.apply(v) as usize]))
        .collect();
    out.sort();
    Ok(out)
}

/// Elements of a coset, sorted.
pub fn coset_elements(c: &LabelingCoset, budget: &OracleBudget) -> Result<Vec<Perm>> {
    budget.check_order(c.size())?;
    let mut out: Vec<Perm> =
        c.group().elements(budget.max_elements).expect("order checked").into_iter().map(|d| d.then(c.rep())).collect();
    out.sort();
    Ok(out)
}
