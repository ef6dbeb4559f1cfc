use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Names of the ground set points, indexed by position. An ordered ground set
/// is `{1, ..., n}` with positions doubling as labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    names: Vec<String>,
    ordered: bool,
}

impl GroundSet {
    pub fn ordered(n: usize) -> Self {
        GroundSet { names: (1..=n).map(|i| i.to_string()).collect(), ordered: true }
    }

    pub fn named(names: Vec<String>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, s) in names.iter().enumerate() {
            if let Some(j) = seen.insert(s.as_str(), i) {
                return Err(Error::Invalid(format!("ground point {:?} listed twice (positions {} and {})", s, j, i)));
            }
        }
        Ok(GroundSet { names, ordered: false })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|s| s == name).map(|p| p as u32)
    }

    pub fn index(&self) -> HashMap<&str, u32> {
        self.names.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect()
    }
}

pub type NodeId = u32;

#[derive(Clone, Debug)]
pub enum Node {
    Vertex(u32),
    Coset(LabelingCoset),
    Set(Vec<NodeId>),
    Tuple(Vec<NodeId>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum NodeKey {
    Vertex(u32),
    Coset(Arc<[u8]>),
    Set(Vec<NodeId>),
    Tuple(Vec<NodeId>),
}

/// Hash-consed node store. Structurally equal nodes share one id, so set
/// children are kept sorted by id and deduplicated.
#[derive(Clone)]
pub struct ObjectDag {
    n: usize,
    nodes: Vec<Node>,
    index: HashMap<NodeKey, NodeId>,
}

impl ObjectDag {
    pub fn new(n: usize) -> Self {
        ObjectDag { n, nodes: Vec::new(), index: HashMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    fn intern(&mut self, key: NodeKey, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.index.insert(key, id);
        id
    }

    pub fn vertex(&mut self, v: u32) -> Result<NodeId> {
        if v as usize >= self.n {
            return Err(Error::DomainMismatch(format!("vertex {} outside a ground set of size {}", v, self.n)));
        }
        Ok(self.intern(NodeKey::Vertex(v), Node::Vertex(v)))
    }

    pub fn coset(&mut self, c: LabelingCoset) -> Result<NodeId> {
        if c.degree() != self.n {
            return Err(Error::DomainMismatch(format!("coset of degree {} in a ground set of size {}", c.degree(), self.n)));
        }
        let key = positional_coset_bytes(&c);
        Ok(self.intern(NodeKey::Coset(key.into()), Node::Coset(c)))
    }

    pub fn set(&mut self, mut children: Vec<NodeId>) -> NodeId {
        children.sort_unstable();
        children.dedup();
        self.intern(NodeKey::Set(children.clone()), Node::Set(children))
    }

    pub fn tuple(&mut self, children: Vec<NodeId>) -> NodeId {
        self.intern(NodeKey::Tuple(children.clone()), Node::Tuple(children))
    }

    pub fn empty_set(&mut self) -> NodeId {
        self.set(Vec::new())
    }

    /// Copies the subobject at `id` of `other` into this store.
    pub fn import(&mut self, other: &ObjectDag, id: NodeId) -> NodeId {
        let mut memo = HashMap::new();
        self.import_with(other, id, &mut memo, &|c: &LabelingCoset| c.clone(), &|v| v)
    }

    fn import_with(
        &mut self,
        other: &ObjectDag,
        id: NodeId,
        memo: &mut HashMap<NodeId, NodeId>,
        map_coset: &dyn Fn(&LabelingCoset) -> LabelingCoset,
        map_vertex: &dyn Fn(u32) -> u32,
    ) -> NodeId {
        if let Some(&x) = memo.get(&id) {
            return x;
        }
        let out = match other.node(id) {
            Node::Vertex(v) => {
                let v = map_vertex(*v);
                self.intern(NodeKey::Vertex(v), Node::Vertex(v))
            }
            Node::Coset(c) => self.coset(map_coset(c)).expect("degrees agree"),
            Node::Set(ch) => {
                let ch: Vec<NodeId> = ch.iter().map(|&c| self.import_with(other, c, memo, map_coset, map_vertex)).collect();
                self.set(ch)
            }
            Node::Tuple(ch) => {
                let ch: Vec<NodeId> = ch.iter().map(|&c| self.import_with(other, c, memo, map_coset, map_vertex)).collect();
                self.tuple(ch)
            }
        };
        memo.insert(id, out);
        out
    }

    /// Nodes reachable from `root`, children before parents, root last.
    pub fn tclosure(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack: Vec<(NodeId, bool)> = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
                continue;
            }
            if seen[id as usize] {
                continue;
            }
            seen[id as usize] = true;
            stack.push((id, true));
            if let Node::Set(ch) | Node::Tuple(ch) = self.node(id) {
                for &c in ch.iter().rev() {
                    if !seen[c as usize] {
                        stack.push((c, false));
                    }
                }
            }
        }
        out
    }
}

/// Coset bytes with positions taken as ordered. Equal cosets give equal bytes,
/// which is all hash-consing needs.
pub(crate) fn positional_coset_bytes(c: &LabelingCoset) -> Vec<u8> {
    let mut out = Vec::new();
    crate::canon::key::push_ordered_coset(&mut out, c);
    out
}

/// A hereditarily finite object over a ground set: a root in a node store.
#[derive(Clone)]
pub struct Object {
    ground: GroundSet,
    dag: ObjectDag,
    root: NodeId,
}

impl fmt::Debug for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(o: &Object, id: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match o.dag.node(id) {
                Node::Vertex(v) => write!(f, "{}", o.ground.names[*v as usize]),
                Node::Coset(c) => write!(f, "{:?}", c),
                Node::Set(ch) | Node::Tuple(ch) => {
                    let (l, r) = if matches!(o.dag.node(id), Node::Set(_)) { ("{", "}") } else { ("(", ")") };
                    write!(f, "{}", l)?;
                    for (k, &c) in ch.iter().enumerate() {
                        if k > 0 {
                            write!(f, ", ")?;
                        }
                        go(o, c, f)?;
                    }
                    write!(f, "{}", r)
                }
            }
        }
        go(self, self.root, f)
    }
}

impl Object {
    pub fn new(ground: GroundSet, dag: ObjectDag, root: NodeId) -> Result<Self> {
        if dag.degree() != ground.len() {
            return Err(Error::DomainMismatch("node store and ground set differ in size".into()));
        }
        if root as usize >= dag.len() {
            return Err(Error::Invalid(format!("root {} not in the node store", root)));
        }
        Ok(Object { ground, dag, root })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn dag(&self) -> &ObjectDag {
        &self.dag
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn degree(&self) -> usize {
        self.ground.len()
    }

    pub fn tclosure(&self) -> Vec<NodeId> {
        self.dag.tclosure(self.root)
    }

    /// The image under a bijection `mu` of positions onto a ground set of the
    /// same size: vertices `v ↦ mu(v)`, cosets `Δρ ↦ mu^-1 Δρ`.
    pub fn apply_map(&self, mu: &Perm, target: GroundSet) -> Result<Object> {
        if mu.len() != self.degree() || target.len() != self.degree() {
            return Err(Error::DomainMismatch("map and ground set differ in size".into()));
        }
        let (dag, root) = map_subobject(&self.dag, self.root, mu);
        Ok(Object { ground: target, dag, root })
    }

    /// `X^λ` for a labeling `λ` of the ground set.
    pub fn image(&self, lambda: &Perm) -> Result<Object> {
        self.apply_map(lambda, GroundSet::ordered(self.degree()))
    }

    /// The total order on ordered objects: integers, then cosets, then tuples,
    /// then sets; sets by size, then by the least element of the symmetric
    /// difference; tuples by length, then by the first differing entry.
    pub fn ordered_compare(&self, other: &Object) -> Result<Ordering> {
        if !self.ground.is_ordered() || !other.ground.is_ordered() {
            return Err(Error::UnorderedGroundSet);
        }
        if self.degree() != other.degree() {
            return Ok(self.degree().cmp(&other.degree()));
        }
        let mut cx = CompareCx::default();
        Ok(cx.cmp((&self.dag, self.root), (&other.dag, other.root)))
    }

    /// Structural equality of two objects over the same ground set.
    pub fn same_as(&self, other: &Object) -> bool {
        self.degree() == other.degree()
            && structural_bytes(&self.dag, self.root) == structural_bytes(&other.dag, other.root)
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        crate::encoding::encode(self)
    }

    pub fn decode(bytes: &[u8]) -> Result<Object> {
        crate::encoding::decode(bytes)
    }
}

pub(crate) fn map_subobject(dag: &ObjectDag, root: NodeId, mu: &Perm) -> (ObjectDag, NodeId) {
    let mut out = ObjectDag::new(dag.degree());
    let mut memo = HashMap::new();
    let r = out.import_with(dag, root, &mut memo, &|c: &LabelingCoset| c.apply_map(mu), &|v| mu.apply(v));
    (out, r)
}

fn kind_rank(n: &Node) -> u8 {
    match n {
        Node::Vertex(_) => 0,
        Node::Coset(_) => 1,
        Node::Tuple(_) => 2,
        Node::Set(_) => 3,
    }
}

#[derive(Default)]
pub(crate) struct CompareCx {
    sorted: HashMap<(usize, NodeId), Vec<NodeId>>,
}

impl CompareCx {
    pub(crate) fn sorted_children(&mut self, dag: &ObjectDag, id: NodeId) -> Vec<NodeId> {
        let key = (dag as *const ObjectDag as usize, id);
        if let Some(v) = self.sorted.get(&key) {
            return v.clone();
        }
        let Node::Set(ch) = dag.node(id) else { return Vec::new() };
        let mut ch = ch.clone();
        ch.sort_by(|&a, &b| self.cmp((dag, a), (dag, b)));
        self.sorted.insert(key, ch.clone());
        ch
    }

    pub(crate) fn cmp(&mut self, a: (&ObjectDag, NodeId), b: (&ObjectDag, NodeId)) -> Ordering {
        if std::ptr::eq(a.0, b.0) && a.1 == b.1 {
            return Ordering::Equal;
        }
        let (na, nb) = (a.0.node(a.1), b.0.node(b.1));
        match kind_rank(na).cmp(&kind_rank(nb)) {
            Ordering::Equal => {}
            o => return o,
        }
        match (na, nb) {
            (Node::Vertex(x), Node::Vertex(y)) => x.cmp(y),
            (Node::Coset(x), Node::Coset(y)) => x.compare(y),
            (Node::Tuple(x), Node::Tuple(y)) => {
                match x.len().cmp(&y.len()) {
                    Ordering::Equal => {}
                    o => return o,
                }
                for (&p, &q) in x.iter().zip(y) {
                    match self.cmp((a.0, p), (b.0, q)) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            (Node::Set(x), Node::Set(y)) => {
                match x.len().cmp(&y.len()) {
                    Ordering::Equal => {}
                    o => return o,
                }
                let sx = self.sorted_children(a.0, a.1);
                let sy = self.sorted_children(b.0, b.1);
                for (&p, &q) in sx.iter().zip(&sy) {
                    match self.cmp((a.0, p), (b.0, q)) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            _ => unreachable!(),
        }
    }
}

/// Injective byte description of a subobject with positions taken as ordered.
pub(crate) fn structural_bytes(dag: &ObjectDag, root: NodeId) -> Vec<u8> {
    let mut memo: HashMap<NodeId, Arc<Vec<u8>>> = HashMap::new();
    for id in dag.tclosure(root) {
        let mut out = Vec::new();
        match dag.node(id) {
            Node::Vertex(v) => {
                out.push(1);
                out.extend_from_slice(&v.to_be_bytes());
            }
            Node::Coset(c) => {
                out.push(2);
                let b = positional_coset_bytes(c);
                out.extend_from_slice(&(b.len() as u32).to_be_bytes());
                out.extend_from_slice(&b);
            }
            Node::Tuple(ch) | Node::Set(ch) => {
                let mut parts: Vec<Arc<Vec<u8>>> = ch.iter().map(|c| memo[c].clone()).collect();
                if matches!(dag.node(id), Node::Set(_)) {
                    out.push(4);
                    parts.sort();
                } else {
                    out.push(3);
                }
                out.extend_from_slice(&(parts.len() as u32).to_be_bytes());
                for p in parts {
                    out.extend_from_slice(&(p.len() as u32).to_be_bytes());
                    out.extend_from_slice(&p);
                }
            }
        }
        memo.insert(id, Arc::new(out));
    }
    Arc::try_unwrap(memo.remove(&root).unwrap()).unwrap_or_else(|a| (*a).clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ordered_obj(n: usize, build: impl FnOnce(&mut ObjectDag) -> NodeId) -> Object {
        let mut dag = ObjectDag::new(n);
        let root = build(&mut dag);
        Object::new(GroundSet::ordered(n), dag, root).unwrap()
    }

    #[test]
    fn hash_consing_shares_equal_nodes() {
        let mut dag = ObjectDag::new(3);
        let a = dag.vertex(0).unwrap();
        let b = dag.vertex(1).unwrap();
        let s1 = dag.set(vec![a, b]);
        let s2 = dag.set(vec![b, a, b]);
        assert_eq!(s1, s2);
        let t1 = dag.tuple(vec![a, b]);
        let t2 = dag.tuple(vec![b, a]);
        assert_ne!(t1, t2);
        let c1 = dag.coset(LabelingCoset::full(3)).unwrap();
        let c2 = dag.coset(LabelingCoset::full(3).apply_map(&Perm::from_images(vec![2, 0, 1]).unwrap())).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(dag.tclosure(s1), vec![a, b, s1]);
    }

    #[test]
    fn order_across_kinds_and_sets() {
        let int = ordered_obj(3, |d| d.vertex(2).unwrap());
        let coset = ordered_obj(3, |d| d.coset(LabelingCoset::full(3)).unwrap());
        let tuple = ordered_obj(3, |d| d.tuple(vec![]));
        let set = ordered_obj(3, |d| d.empty_set());
        assert_eq!(int.ordered_compare(&coset).unwrap(), Ordering::Less);
        assert_eq!(coset.ordered_compare(&tuple).unwrap(), Ordering::Less);
        assert_eq!(tuple.ordered_compare(&set).unwrap(), Ordering::Less);
        let s02 = ordered_obj(3, |d| {
            let a = d.vertex(0).unwrap();
            let b = d.vertex(2).unwrap();
            d.set(vec![a, b])
        });
        let s12 = ordered_obj(3, |d| {
            let a = d.vertex(1).unwrap();
            let b = d.vertex(2).unwrap();
            d.set(vec![a, b])
        });
        let s1 = ordered_obj(3, |d| {
            let a = d.vertex(1).unwrap();
            d.set(vec![a])
        });
        assert_eq!(s02.ordered_compare(&s12).unwrap(), Ordering::Less);
        assert_eq!(s1.ordered_compare(&s02).unwrap(), Ordering::Less);
        let t = ordered_obj(3, |d| {
            let a = d.vertex(1).unwrap();
            let b = d.vertex(0).unwrap();
            d.tuple(vec![a, b])
        });
        let u = ordered_obj(3, |d| {
            let a = d.vertex(0).unwrap();
            let b = d.vertex(2).unwrap();
            d.tuple(vec![a, b])
        });
        assert_eq!(u.ordered_compare(&t).unwrap(), Ordering::Less);
    }

    #[test]
    fn unordered_compare_is_rejected() {
        let mut dag = ObjectDag::new(2);
        let r = dag.vertex(0).unwrap();
        let o = Object::new(GroundSet::named(vec!["a".into(), "b".into()]).unwrap(), dag, r).unwrap();
        assert_eq!(o.ordered_compare(&o), Err(Error::UnorderedGroundSet));
    }

    #[test]
    fn image_maps_vertices_and_cosets() {
        let mut dag = ObjectDag::new(3);
        let a = dag.vertex(0).unwrap();
        let c = dag.coset(LabelingCoset::singleton(Perm::identity(3))).unwrap();
        let root = dag.tuple(vec![a, c]);
        let o = Object::new(GroundSet::named(vec!["x".into(), "y".into(), "z".into()]).unwrap(), dag, root).unwrap();
        let lam = Perm::from_images(vec![2, 0, 1]).unwrap();
        let img = o.image(&lam).unwrap();
        let Node::Tuple(ch) = img.dag().node(img.root()) else { panic!() };
        assert!(matches!(img.dag().node(ch[0]), Node::Vertex(2)));
        let Node::Coset(k) = img.dag().node(ch[1]) else { panic!() };
        assert_eq!(k.rep(), &lam.inverse());
    }
}
