use std::collections::HashMap;

use super::key::object_image;
use super::{ordered_partition, Canonizer};
use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::object::{GroundSet, Node, NodeId, Object, ObjectDag};

/// Canonical labeling coset of every node reached from the root.
#[derive(Clone, Debug, Default)]
pub struct CanonTable {
    map: HashMap<NodeId, LabelingCoset>,
}

impl CanonTable {
    pub fn get(&self, id: NodeId) -> Option<&LabelingCoset> {
        self.map.get(&id)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct CanonResult {
    pub coset: LabelingCoset,
    pub table: CanonTable,
}

/// A code: words over an alphabet indexed by positions. Symbols are indices
/// into the alphabet, whose declared order is part of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    pub positions: usize,
    pub alphabet: Vec<String>,
    pub words: Vec<Vec<u32>>,
}

impl Code {
    /// The code as an object: symbol `k` becomes the `k`-fold nested empty set,
    /// a word the set of pairs `(position, symbol)`, the code the set of words.
    pub fn to_object(&self, ground: GroundSet) -> Result<Object> {
        if ground.len() != self.positions {
            return Err(Error::DomainMismatch("ground set and code length differ".into()));
        }
        let mut dag = ObjectDag::new(self.positions);
        let mut towers = vec![dag.empty_set()];
        for _ in 1..self.alphabet.len() {
            let last = *towers.last().unwrap();
            towers.push(dag.set(vec![last]));
        }
        let mut words = Vec::new();
        for w in &self.words {
            if w.len() != self.positions {
                return Err(Error::Invalid(format!("word of length {} in a code of length {}", w.len(), self.positions)));
            }
            let mut pairs = Vec::new();
            for (v, &s) in w.iter().enumerate() {
                let sym = *towers
                    .get(s as usize)
                    .ok_or_else(|| Error::Invalid(format!("symbol index {} outside the alphabet", s)))?;
                let vx = dag.vertex(v as u32)?;
                pairs.push(dag.tuple(vec![vx, sym]));
            }
            words.push(dag.set(pairs));
        }
        let root = dag.set(words);
        Object::new(ground, dag, root)
    }
}

/// The group as an object: each element `δ` becomes the set of pairs
/// `(v, δ(v))`, the group the set of these.
pub fn group_object(g: &PermutationGroup, ground: GroundSet, cap: usize) -> Result<Object> {
    if ground.len() != g.degree() {
        return Err(Error::DomainMismatch("ground set and group degree differ".into()));
    }
    let elems = g
        .elements(cap)
        .ok_or_else(|| Error::BudgetExceeded(format!("group order {} exceeds the enumeration cap {}", g.order(), cap)))?;
    let n = g.degree();
    let mut dag = ObjectDag::new(n);
    let verts: Vec<NodeId> = (0..n as u32).map(|v| dag.vertex(v)).collect::<Result<_>>()?;
    let mut members = Vec::with_capacity(elems.len());
    for d in &elems {
        let pairs: Vec<NodeId> = (0..n).map(|v| dag.tuple(vec![verts[v], verts[d.apply(v as u32) as usize]])).collect();
        members.push(dag.set(pairs));
    }
    let root = dag.set(members);
    Object::new(ground, dag, root)
}

pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

impl Canonizer {
    /// Canonical labeling of an object with respect to `Δρ`, memoized per node.
    pub fn cl_object(&self, obj: &Object, c: &LabelingCoset) -> Result<CanonResult> {
        if c.degree() != obj.degree() {
            return Err(Error::DomainMismatch("ambient coset and object differ in size".into()));
        }
        let dag = obj.dag();
        let mut table = CanonTable::default();
        for id in obj.tclosure() {
            let res = match dag.node(id) {
                Node::Vertex(v) => self.cl_point(*v, c),
                Node::Coset(t) => self.cl_int(t, c),
                Node::Tuple(ch) => self.cl_int_iter(ch.iter().map(|x| &table.map[x]), c),
                Node::Set(ch) => {
                    let items: Vec<(Vec<u8>, LabelingCoset)> = self.map(ch, |&x| {
                        let l = &table.map[&x];
                        let mut memo = HashMap::new();
                        (object_image(dag, x, l.rep(), &mut memo), l.clone())
                    });
                    let mut acc = c.clone();
                    for class in ordered_partition(items) {
                        acc = self.cl_set_unique(&class, &acc);
                    }
                    acc
                }
            };
            table.map.insert(id, res);
        }
        let coset = table.map[&obj.root()].clone();
        Ok(CanonResult { coset, table })
    }

    /// `X^λ` for any `λ` in the canonical labeling coset of `X`.
    pub fn canonical_form(&self, obj: &Object) -> Result<Object> {
        let res = self.cl_object(obj, &LabelingCoset::full(obj.degree()))?;
        obj.image(res.coset.rep())
    }

    /// Canonical labeling of an object whose ground points carry colors,
    /// the color classes given in their canonical order.
    pub fn cl_colored_object(&self, obj: &Object, colors: &[Vec<u32>]) -> Result<CanonResult> {
        let c = super::hyper::color_coset(obj.degree(), colors)?;
        self.cl_object(obj, &c)
    }

    pub fn cl_code(&self, code: &Code) -> Result<CanonResult> {
        let obj = code.to_object(GroundSet::ordered(code.positions))?;
        self.cl_object(&obj, &LabelingCoset::full(code.positions))
    }

    pub fn cl_permgroup(&self, g: &PermutationGroup, cap: usize) -> Result<CanonResult> {
        let obj = group_object(g, GroundSet::ordered(g.degree()), cap)?;
        self.cl_object(&obj, &LabelingCoset::full(g.degree()))
    }
}
