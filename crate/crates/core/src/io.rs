//! JSON input formats. Syntax and shape errors carry the position reported by
//! the JSON reader; semantic errors point at the first occurrence of the
//! offending token.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use crate::canon::{group_object, Canonizer, Code};
use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::object::{GroundSet, NodeId, Object, ObjectDag};
use crate::perm::Perm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Hyper,
    Graph,
    Code,
    Group,
    Object,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyper" => Ok(Kind::Hyper),
            "graph" => Ok(Kind::Graph),
            "code" => Ok(Kind::Code),
            "group" => Ok(Kind::Group),
            "object" => Ok(Kind::Object),
            _ => Err(Error::Invalid(format!("unknown kind {:?}", s))),
        }
    }
}

/// Hypergraph with named vertices. Edges are sorted and distinct; colors are
/// either empty or an ordered partition of the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<u32>>,
    pub colors: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct NamedCode {
    pub positions: Vec<String>,
    pub code: Code,
}

#[derive(Clone, Debug)]
pub struct NamedGroup {
    pub points: Vec<String>,
    pub group: PermutationGroup,
}

#[derive(Clone, Debug)]
pub enum Instance {
    Hyper(Hypergraph),
    Code(NamedCode),
    Group(NamedGroup),
    Object(Object),
}

pub use crate::canon::DEFAULT_GROUP_CAP;

impl Instance {
    pub fn names(&self) -> &[String] {
        match self {
            Instance::Hyper(h) => &h.vertices,
            Instance::Code(c) => &c.positions,
            Instance::Group(g) => &g.points,
            Instance::Object(o) => o.ground().names(),
        }
    }

    /// The instance as an object over its named ground set; its images under
    /// canonical labelings are what gets encoded.
    pub fn to_object(&self, group_cap: usize) -> Result<Object> {
        let ground = GroundSet::named(self.names().to_vec())?;
        match self {
            Instance::Hyper(h) => h.to_object(),
            Instance::Code(c) => c.code.to_object(ground),
            Instance::Group(g) => group_object(&g.group, ground, group_cap),
            Instance::Object(o) => Ok(o.clone()),
        }
    }

    /// Canonical labeling coset; its group part is the automorphism group.
    pub fn canonize(&self, cz: &Canonizer, group_cap: usize) -> Result<LabelingCoset> {
        match self {
            Instance::Hyper(h) => cz.cl_colored_hypergraph(h.vertices.len(), &h.edges, &h.colors),
            Instance::Code(c) => Ok(cz.cl_code(&c.code)?.coset),
            Instance::Group(g) => Ok(cz.cl_permgroup(&g.group, group_cap)?.coset),
            Instance::Object(o) => Ok(cz.cl_object(o, &LabelingCoset::full(o.degree()))?.coset),
        }
    }
}

impl Hypergraph {
    /// The set of edges; with colors, the pair of it and the tuple of classes.
    pub fn to_object(&self) -> Result<Object> {
        let n = self.vertices.len();
        let mut dag = ObjectDag::new(n);
        let subset = |dag: &mut ObjectDag, s: &[u32]| -> Result<NodeId> {
            let vs = s.iter().map(|&v| dag.vertex(v)).collect::<Result<Vec<_>>>()?;
            Ok(dag.set(vs))
        };
        let edges = self.edges.iter().map(|e| subset(&mut dag, e)).collect::<Result<Vec<_>>>()?;
        let mut root = dag.set(edges);
        if !self.colors.is_empty() {
            let classes = self.colors.iter().map(|c| subset(&mut dag, c)).collect::<Result<Vec<_>>>()?;
            let t = dag.tuple(classes);
            root = dag.tuple(vec![root, t]);
        }
        Object::new(GroundSet::named(self.vertices.clone())?, dag, root)
    }
}

pub fn parse(kind: Kind, text: &str) -> Result<Instance> {
    Ok(match kind {
        Kind::Hyper => Instance::Hyper(parse_hypergraph(text)?),
        Kind::Graph => Instance::Hyper(parse_graph(text)?),
        Kind::Code => Instance::Code(parse_code(text)?),
        Kind::Group => Instance::Group(parse_group(text)?),
        Kind::Object => Instance::Object(parse_object(text)?),
    })
}

fn syntax(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Error at the first quoted `token` after the key `section`.
fn semantic(text: &str, section: &str, token: Option<&str>, message: String) -> Error {
    let key = format!("\"{}\"", section);
    let start = text.find(&key).unwrap_or(0);
    let at = token
        .and_then(|t| {
            let q = serde_json::to_string(t).ok()?;
            text[start..].find(&q).map(|i| start + i)
        })
        .unwrap_or(start);
    let (line, column) = position(text, at);
    Error::Parse { line, column, message }
}

fn name_index<'a>(text: &str, section: &str, names: &'a [String]) -> Result<HashMap<&'a str, u32>> {
    let mut idx = HashMap::new();
    for (i, s) in names.iter().enumerate() {
        if idx.insert(s.as_str(), i as u32).is_some() {
            return Err(semantic(text, section, Some(s), format!("{:?} listed twice", s)));
        }
    }
    Ok(idx)
}

fn lookup(text: &str, section: &str, idx: &HashMap<&str, u32>, name: &str) -> Result<u32> {
    idx.get(name).copied().ok_or_else(|| semantic(text, section, Some(name), format!("unknown point {:?}", name)))
}

fn sorted_subset(text: &str, section: &str, idx: &HashMap<&str, u32>, names: &[String]) -> Result<Vec<u32>> {
    let mut s = names.iter().map(|x| lookup(text, section, idx, x)).collect::<Result<Vec<_>>>()?;
    s.sort_unstable();
    if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
        let dup = names.iter().find(|x| idx[x.as_str()] == w[0]).unwrap();
        return Err(semantic(text, section, Some(dup), format!("{:?} repeated within one set", dup)));
    }
    Ok(s)
}

fn map_perm(text: &str, section: &str, idx: &HashMap<&str, u32>, n: usize, m: &BTreeMap<String, String>) -> Result<Perm> {
    let mut images: Vec<u32> = (0..n as u32).collect();
    for (k, v) in m {
        images[lookup(text, section, idx, k)? as usize] = lookup(text, section, idx, v)?;
    }
    let first = m.keys().next().map(String::as_str);
    Perm::from_images(images).map_err(|e| semantic(text, section, first, format!("generator is not a bijection: {}", e)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHyper {
    vertices: Vec<String>,
    edges: Vec<Vec<String>>,
    #[serde(default)]
    colors: Vec<Vec<String>>,
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let raw: RawHyper = serde_json::from_str(text).map_err(syntax)?;
    let idx = name_index(text, "vertices", &raw.vertices)?;
    let mut edges = Vec::new();
    let mut distinct = std::collections::HashSet::new();
    for e in &raw.edges {
        let s = sorted_subset(text, "edges", &idx, e)?;
        if distinct.insert(s.clone()) {
            edges.push(s);
        }
    }
    let mut colors = Vec::new();
    let mut seen = vec![false; raw.vertices.len()];
    for c in &raw.colors {
        let s = sorted_subset(text, "colors", &idx, c)?;
        for &v in &s {
            if std::mem::replace(&mut seen[v as usize], true) {
                let name = &raw.vertices[v as usize];
                return Err(semantic(text, "colors", Some(name), format!("{:?} has two colors", name)));
            }
        }
        if !s.is_empty() {
            colors.push(s);
        }
    }
    if !raw.colors.is_empty() {
        if let Some(v) = seen.iter().position(|&x| !x) {
            return Err(semantic(text, "colors", None, format!("{:?} has no color", raw.vertices[v])));
        }
    }
    Ok(Hypergraph { vertices: raw.vertices, edges, colors })
}

/// A hypergraph whose edges all have two vertices.
pub fn parse_graph(text: &str) -> Result<Hypergraph> {
    let raw: RawHyper = serde_json::from_str(text).map_err(syntax)?;
    if let Some(e) = raw.edges.iter().find(|e| e.len() != 2) {
        return Err(semantic(text, "edges", e.first().map(String::as_str), format!("edge {:?} does not have two ends", e)));
    }
    parse_hypergraph(text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCode {
    positions: Vec<String>,
    alphabet: Vec<String>,
    words: Vec<BTreeMap<String, String>>,
}

pub fn parse_code(text: &str) -> Result<NamedCode> {
    let raw: RawCode = serde_json::from_str(text).map_err(syntax)?;
    let idx = name_index(text, "positions", &raw.positions)?;
    let sym = name_index(text, "alphabet", &raw.alphabet)?;
    let mut words = Vec::new();
    for w in &raw.words {
        let mut word = vec![u32::MAX; raw.positions.len()];
        for (p, s) in w {
            let p = lookup(text, "words", &idx, p)?;
            word[p as usize] = *sym
                .get(s.as_str())
                .ok_or_else(|| semantic(text, "words", Some(s), format!("symbol {:?} not in the alphabet", s)))?;
        }
        if let Some(p) = word.iter().position(|&s| s == u32::MAX) {
            return Err(semantic(text, "words", None, format!("a word has no symbol at position {:?}", raw.positions[p])));
        }
        words.push(word);
    }
    let code = Code { positions: raw.positions.len(), alphabet: raw.alphabet, words };
    Ok(NamedCode { positions: raw.positions, code })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    points: Vec<String>,
    generators: Vec<BTreeMap<String, String>>,
}

pub fn parse_group(text: &str) -> Result<NamedGroup> {
    let raw: RawGroup = serde_json::from_str(text).map_err(syntax)?;
    let idx = name_index(text, "points", &raw.points)?;
    let n = raw.points.len();
    let gens = raw.generators.iter().map(|m| map_perm(text, "generators", &idx, n, m)).collect::<Result<Vec<_>>>()?;
    let group = PermutationGroup::from_generators(n, &gens)?;
    Ok(NamedGroup { points: raw.points, group })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObjectFile {
    ground: Vec<String>,
    object: RawNode,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RawNode {
    Vertex(String),
    Coset(RawCoset),
    Set(Vec<RawNode>),
    Tuple(Vec<RawNode>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoset {
    generators: Vec<BTreeMap<String, String>>,
    rep: BTreeMap<String, u64>,
}

pub fn parse_object(text: &str) -> Result<Object> {
    let raw: RawObjectFile = serde_json::from_str(text).map_err(syntax)?;
    let idx = name_index(text, "ground", &raw.ground)?;
    let n = raw.ground.len();
    let mut dag = ObjectDag::new(n);
    let root = build(text, &idx, n, &raw.object, &mut dag)?;
    Object::new(GroundSet::named(raw.ground)?, dag, root)
}

fn build(text: &str, idx: &HashMap<&str, u32>, n: usize, node: &RawNode, dag: &mut ObjectDag) -> Result<NodeId> {
    match node {
        RawNode::Vertex(name) => dag.vertex(lookup(text, "object", idx, name)?),
        RawNode::Coset(c) => {
            let gens = c.generators.iter().map(|m| map_perm(text, "coset", idx, n, m)).collect::<Result<Vec<_>>>()?;
            let mut images = vec![u32::MAX; n];
            for (k, &label) in &c.rep {
                let v = lookup(text, "rep", idx, k)?;
                if label == 0 || label > n as u64 {
                    return Err(semantic(text, "rep", Some(k), format!("label {} outside 1..{}", label, n)));
                }
                images[v as usize] = (label - 1) as u32;
            }
            let rep = Perm::from_images(images)
                .map_err(|e| semantic(text, "rep", None, format!("rep is not a labeling: {}", e)))?;
            let group = PermutationGroup::from_generators(n, &gens)?;
            dag.coset(LabelingCoset::new(Arc::new(group), rep)?)
        }
        RawNode::Set(ch) => {
            let ids = ch.iter().map(|x| build(text, idx, n, x, dag)).collect::<Result<Vec<_>>>()?;
            Ok(dag.set(ids))
        }
        RawNode::Tuple(ch) => {
            let ids = ch.iter().map(|x| build(text, idx, n, x, dag)).collect::<Result<Vec<_>>>()?;
            Ok(dag.tuple(ids))
        }
    }
}
