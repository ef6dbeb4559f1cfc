//! Byte encoding of ordered objects.
//!
//! ```text
//! object  := "HFS1" n:u32 node
//! node    := 0x01 label:u32
//!          | 0x02 k:u32 perm{k} perm        canonical generators, then least element
//!          | 0x03 len:u32 node{len}         entries in order
//!          | 0x04 card:u32 node{card}       members in increasing order
//! perm    := image:u32{n}                   1-based images
//! ```
//! Integers are big-endian.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::coset::LabelingCoset;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::object::{CompareCx, GroundSet, Node, NodeId, Object, ObjectDag};
use crate::perm::Perm;

pub const MAGIC: &[u8; 4] = b"HFS1";
const TAG_VERTEX: u8 = 0x01;
const TAG_COSET: u8 = 0x02;
const TAG_TUPLE: u8 = 0x03;
const TAG_SET: u8 = 0x04;
const MAX_DEPTH: usize = 2048;

fn push_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_be_bytes());
}

fn push_perm(out: &mut Vec<u8>, p: &Perm) {
    for &x in p.images() {
        push_u32(out, x + 1);
    }
}

pub fn encode(obj: &Object) -> Result<Vec<u8>> {
    if !obj.ground().is_ordered() {
        return Err(Error::UnorderedGroundSet);
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    push_u32(&mut out, obj.degree() as u32);
    let mut cx = CompareCx::default();
    let mut memo = std::collections::HashMap::new();
    encode_node(obj.dag(), obj.root(), &mut cx, &mut memo, &mut out);
    Ok(out)
}

fn encode_node(
    dag: &ObjectDag,
    id: NodeId,
    cx: &mut CompareCx,
    memo: &mut std::collections::HashMap<NodeId, (usize, usize)>,
    out: &mut Vec<u8>,
) {
    if let Some(&(s, e)) = memo.get(&id) {
        out.extend_from_within(s..e);
        return;
    }
    let start = out.len();
    match dag.node(id) {
        Node::Vertex(v) => {
            out.push(TAG_VERTEX);
            push_u32(out, v + 1);
        }
        Node::Coset(c) => {
            out.push(TAG_COSET);
            let (gens, min) = c.canonical_generators();
            push_u32(out, gens.len() as u32);
            for g in &gens {
                push_perm(out, g);
            }
            push_perm(out, &min);
        }
        Node::Tuple(ch) => {
            out.push(TAG_TUPLE);
            push_u32(out, ch.len() as u32);
            for &c in ch {
                encode_node(dag, c, cx, memo, out);
            }
        }
        Node::Set(_) => {
            let ch = cx.sorted_children(dag, id);
            out.push(TAG_SET);
            push_u32(out, ch.len() as u32);
            for c in ch {
                encode_node(dag, c, cx, memo, out);
            }
        }
    }
    memo.insert(id, (start, out.len()));
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Decode { offset: self.at, message: message.into() })
    }

    fn u8(&mut self) -> Result<u8> {
        match self.bytes.get(self.at) {
            Some(&b) => {
                self.at += 1;
                Ok(b)
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        if self.bytes.len() - self.at < 4 {
            return self.err("unexpected end of input");
        }
        let b = &self.bytes[self.at..self.at + 4];
        self.at += 4;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.at
    }

    fn perm(&mut self, n: usize) -> Result<Perm> {
        let start = self.at;
        let mut images = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.u32()?;
            if x == 0 || x as usize > n {
                return self.err(format!("permutation image {} outside 1..{}", x, n));
            }
            images.push(x - 1);
        }
        Perm::from_images(images).map_err(|_| Error::Decode { offset: start, message: "repeated permutation image".into() })
    }
}

pub fn decode(bytes: &[u8]) -> Result<Object> {
    let mut r = Reader { bytes, at: 0 };
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return r.err("missing HFS1 header");
    }
    r.at = 4;
    let n = r.u32()? as usize;
    if n > (1 << 20) {
        return r.err(format!("ground set size {} is too large", n));
    }
    let mut dag = ObjectDag::new(n);
    let root = decode_node(&mut r, &mut dag, n, 0)?;
    if r.remaining() != 0 {
        return r.err("trailing bytes after the root object");
    }
    Object::new(GroundSet::ordered(n), dag, root)
}

fn decode_node(r: &mut Reader, dag: &mut ObjectDag, n: usize, depth: usize) -> Result<NodeId> {
    if depth > MAX_DEPTH {
        return r.err("nesting too deep");
    }
    let start = r.at;
    match r.u8()? {
        TAG_VERTEX => {
            let x = r.u32()?;
            if x == 0 || x as usize > n {
                return r.err(format!("vertex label {} outside 1..{}", x, n));
            }
            dag.vertex(x - 1)
        }
        TAG_COSET => {
            let k = r.u32()? as usize;
            if k.saturating_add(1).saturating_mul(4 * n) > r.remaining() {
                return r.err("coset generator count exceeds the input");
            }
            let gens = (0..k).map(|_| r.perm(n)).collect::<Result<Vec<_>>>()?;
            let min = r.perm(n)?;
            let group = PermutationGroup::from_generators(n, &gens)?;
            let c = LabelingCoset::new(Arc::new(group), min.clone())?;
            let (cg, cm) = c.canonical_generators();
            if cg != gens || cm != min {
                return Err(Error::Decode { offset: start, message: "coset is not in canonical form".into() });
            }
            dag.coset(c)
        }
        tag @ (TAG_TUPLE | TAG_SET) => {
            let len = r.u32()? as usize;
            if len > r.remaining() / 5 {
                return r.err("length exceeds the input");
            }
            let mut ch = Vec::with_capacity(len);
            for _ in 0..len {
                ch.push(decode_node(r, dag, n, depth + 1)?);
            }
            if tag == TAG_TUPLE {
                Ok(dag.tuple(ch))
            } else {
                let mut cx = CompareCx::default();
                for w in ch.windows(2) {
                    if cx.cmp((dag, w[0]), (dag, w[1])) != Ordering::Less {
                        return Err(Error::Decode {
                            offset: start,
                            message: "set members are not strictly increasing".into(),
                        });
                    }
                }
                Ok(dag.set(ch))
            }
        }
        other => Err(Error::Decode { offset: start, message: format!("unknown tag 0x{:02x}", other) }),
    }
}
