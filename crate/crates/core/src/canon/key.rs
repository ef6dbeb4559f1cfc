//! Injective byte keys for ordered images, used to sort and compare branches.
//! Set members are sorted by their own key bytes.

use std::collections::HashMap;

use crate::coset::LabelingCoset;
use crate::object::{Node, NodeId, ObjectDag};
use crate::perm::Perm;

fn push_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_be_bytes());
}

/// A coset over an ordered domain, described canonically.
pub(crate) fn push_ordered_coset(out: &mut Vec<u8>, c: &LabelingCoset) {
    let g = c.group();
    push_u32(out, c.degree() as u32);
    match g.cells() {
        Some(cells) => {
            out.push(b'S');
            for &x in cells {
                push_u32(out, x);
            }
        }
        None => {
            out.push(b'G');
            let gens = g.canonical_generators();
            push_u32(out, gens.len() as u32);
            for p in gens {
                for &x in p.images() {
                    push_u32(out, x);
                }
            }
        }
    }
    for &x in c.lexmin_element().images() {
        push_u32(out, x);
    }
}

pub(crate) fn coset_image(c: &LabelingCoset, lambda: &Perm) -> Vec<u8> {
    let mut out = Vec::new();
    push_ordered_coset(&mut out, &c.apply_map(lambda));
    out
}

pub(crate) fn int_set(lambda: &Perm, set: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = set.iter().map(|&x| lambda.apply(x)).collect();
    v.sort_unstable();
    v
}

pub(crate) fn push_ints(out: &mut Vec<u8>, xs: &[u32]) {
    push_u32(out, xs.len() as u32);
    for &x in xs {
        push_u32(out, x);
    }
}

/// Length-prefixed members, sorted and deduplicated.
pub(crate) fn push_set(out: &mut Vec<u8>, mut items: Vec<Vec<u8>>) {
    items.sort_unstable();
    items.dedup();
    push_u32(out, items.len() as u32);
    for it in items {
        push_u32(out, it.len() as u32);
        out.extend_from_slice(&it);
    }
}

/// Key of the ordered image `X^λ` of a subobject.
pub(crate) fn object_image(dag: &ObjectDag, root: NodeId, lambda: &Perm, memo: &mut HashMap<NodeId, Vec<u8>>) -> Vec<u8> {
    if let Some(k) = memo.get(&root) {
        return k.clone();
    }
    let mut out = Vec::new();
    match dag.node(root) {
        Node::Vertex(v) => {
            out.push(1);
            push_u32(&mut out, lambda.apply(*v));
        }
        Node::Coset(c) => {
            out.push(2);
            push_ordered_coset(&mut out, &c.apply_map(lambda));
        }
        Node::Tuple(ch) => {
            out.push(3);
            push_u32(&mut out, ch.len() as u32);
            for &c in ch {
                let k = object_image(dag, c, lambda, memo);
                push_u32(&mut out, k.len() as u32);
                out.extend_from_slice(&k);
            }
        }
        Node::Set(ch) => {
            out.push(4);
            let items = ch.iter().map(|&c| object_image(dag, c, lambda, memo)).collect();
            push_set(&mut out, items);
        }
    }
    memo.insert(root, out.clone());
    out
}
