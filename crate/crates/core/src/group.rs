use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::perm::Perm;

const NONE: u32 = u32::MAX;

/// One nontrivial level of a stabilizer chain. The level group is the
/// pointwise stabilizer of every point below `base`.
#[derive(Clone)]
pub struct Level {
    base: u32,
    orbit: Vec<u32>,
    pos: Vec<u32>,
    trans: Vec<Perm>,
    trans_inv: Vec<Perm>,
}

impl Level {
    fn new(n: usize, base: u32) -> Self {
        let mut pos = vec![NONE; n];
        pos[base as usize] = 0;
        Level {
            base,
            orbit: vec![base],
            pos,
            trans: vec![Perm::identity(n)],
            trans_inv: vec![Perm::identity(n)],
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn orbit(&self) -> &[u32] {
        &self.orbit
    }

    /// Some element of the level group mapping the base to `point`.
    pub fn transversal(&self, point: u32) -> Option<&Perm> {
        match self.pos[point as usize] {
            NONE => None,
            k => Some(&self.trans[k as usize]),
        }
    }
}

/// Stabilizer chain over the fixed base `0..n`, storing only nontrivial levels.
#[derive(Clone)]
struct Chain {
    n: usize,
    gens: Vec<Perm>,
    first: Vec<u32>,
    levels: Vec<Level>,
}

impl Chain {
    fn new(n: usize) -> Self {
        Chain { n, gens: Vec::new(), first: Vec::new(), levels: Vec::new() }
    }

    fn level_index(&self, b: u32) -> std::result::Result<usize, usize> {
        self.levels.binary_search_by_key(&b, |l| l.base)
    }

    fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        let mut small: u64 = 1;
        for l in &self.levels {
            let k = l.orbit.len() as u64;
            match small.checked_mul(k) {
                Some(s) => small = s,
                None => {
                    acc *= small;
                    small = k;
                }
            }
        }
        acc * small
    }

    /// Sifts `h`; returns the residue and whether it reached the identity.
    fn strip(&self, mut h: Perm) -> (Perm, bool) {
        let mut from = 0usize;
        loop {
            let b = match h.first_moved_from(from) {
                None => return (h, true),
                Some(b) => b,
            };
            let li = match self.level_index(b) {
                Ok(li) => li,
                Err(_) => return (h, false),
            };
            let lvl = &self.levels[li];
            let k = lvl.pos[h.apply(b) as usize];
            if k == NONE {
                return (h, false);
            }
            h = h.then(&lvl.trans_inv[k as usize]);
            from = b as usize + 1;
        }
    }

    fn contains(&self, h: &Perm) -> bool {
        let mut from = 0usize;
        let mut h = std::borrow::Cow::Borrowed(h);
        loop {
            let b = match h.first_moved_from(from) {
                None => return true,
                Some(b) => b,
            };
            let li = match self.level_index(b) {
                Ok(li) => li,
                Err(_) => return false,
            };
            let lvl = &self.levels[li];
            let k = lvl.pos[h.apply(b) as usize];
            if k == NONE {
                return false;
            }
            h = std::borrow::Cow::Owned(h.then(&lvl.trans_inv[k as usize]));
            from = b as usize + 1;
        }
    }

    fn extend_orbit(&mut self, li: usize) {
        let base = self.levels[li].base;
        let mut k = 0;
        while k < self.levels[li].orbit.len() {
            let beta = self.levels[li].orbit[k];
            for gi in 0..self.gens.len() {
                if self.first[gi] < base {
                    continue;
                }
                let img = self.gens[gi].apply(beta);
                if self.levels[li].pos[img as usize] == NONE {
                    let t = self.levels[li].trans[k].then(&self.gens[gi]);
                    let lvl = &mut self.levels[li];
                    lvl.pos[img as usize] = lvl.orbit.len() as u32;
                    lvl.orbit.push(img);
                    lvl.trans_inv.push(t.inverse());
                    lvl.trans.push(t);
                }
            }
            k += 1;
        }
    }

    /// Adds a non-identity element as a strong generator; returns the index
    /// of the deepest level it touches.
    fn add_strong(&mut self, h: Perm) -> usize {
        let b = h.first_moved().expect("identity cannot be a strong generator");
        if let Err(at) = self.level_index(b) {
            self.levels.insert(at, Level::new(self.n, b));
        }
        self.gens.push(h);
        self.first.push(b);
        let deepest = self.level_index(b).unwrap();
        for li in 0..=deepest {
            self.extend_orbit(li);
        }
        deepest
    }

    /// Sifts and, if needed, inserts `h` without closing the chain.
    fn sift_insert(&mut self, h: Perm) -> bool {
        let (res, ok) = self.strip(h);
        if ok {
            false
        } else {
            self.add_strong(res);
            true
        }
    }

    /// Deterministic Schreier-Sims closure. With a known target order the
    /// loop stops as soon as the product of basic orbit lengths reaches it.
    fn close(&mut self, target: Option<&BigUint>) {
        if let Some(t) = target {
            if &self.order() == t {
                return;
            }
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            let base = self.levels[li].base;
            let mut added: Option<usize> = None;
            'scan: for k in 0..self.levels[li].orbit.len() {
                for gi in 0..self.gens.len() {
                    if self.first[gi] < base {
                        continue;
                    }
                    let lvl = &self.levels[li];
                    let g = &self.gens[gi];
                    let img = g.apply(lvl.orbit[k]);
                    let kk = lvl.pos[img as usize] as usize;
                    let ug = lvl.trans[k].then(g);
                    if ug == lvl.trans[kk] {
                        continue;
                    }
                    let h = ug.then(&lvl.trans_inv[kk]);
                    let (res, ok) = self.strip(h);
                    if !ok {
                        added = Some(self.add_strong(res));
                        break 'scan;
                    }
                }
            }
            match added {
                Some(d) => {
                    if let Some(t) = target {
                        if &self.order() == t {
                            return;
                        }
                    }
                    i = d as isize;
                }
                None => i -= 1,
            }
        }
    }

    /// Minimal element of the coset `H_start * r`, where `H_start` is the
    /// group of level `start` and the product means `h` first, then `r`.
    fn lexmin_from(&self, start: usize, r: &Perm) -> Perm {
        let mut cur = r.clone();
        for lvl in &self.levels[start..] {
            let mut best = 0usize;
            let mut best_val = u32::MAX;
            for (k, &beta) in lvl.orbit.iter().enumerate() {
                let v = cur.apply(beta);
                if v < best_val {
                    best_val = v;
                    best = k;
                }
            }
            if best != 0 {
                cur = lvl.trans[best].then(&cur);
            }
        }
        cur
    }
}

/// A permutation group on `0..n` with an exact order.
pub struct PermutationGroup {
    n: usize,
    order: BigUint,
    gens: Vec<Perm>,
    /// For groups that are the full symmetric group on each of their orbits:
    /// the least point of each point's orbit.
    cells: Option<Vec<u32>>,
    chain: OnceLock<Chain>,
    orbit_rep: OnceLock<Vec<u32>>,
    canonical: OnceLock<Vec<Perm>>,
}

impl Clone for PermutationGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        let orbit_rep = OnceLock::new();
        if let Some(o) = self.orbit_rep.get() {
            let _ = orbit_rep.set(o.clone());
        }
        let canonical = OnceLock::new();
        if let Some(c) = self.canonical.get() {
            let _ = canonical.set(c.clone());
        }
        PermutationGroup {
            n: self.n,
            order: self.order.clone(),
            gens: self.gens.clone(),
            cells: self.cells.clone(),
            chain,
            orbit_rep,
            canonical,
        }
    }
}

impl fmt::Debug for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationGroup")
            .field("degree", &self.n)
            .field("order", &self.order)
            .field("generators", &self.gens)
            .finish()
    }
}

impl PartialEq for PermutationGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.order == other.order && self.is_subgroup_of(other)
    }
}

impl Eq for PermutationGroup {}

pub(crate) fn factorial(k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=k as u64 {
        acc *= i;
    }
    acc
}

impl PermutationGroup {
    fn from_chain(chain: Chain) -> Self {
        let order = chain.order();
        let g = PermutationGroup {
            n: chain.n,
            order,
            gens: chain.gens.clone(),
            cells: None,
            chain: OnceLock::new(),
            orbit_rep: OnceLock::new(),
            canonical: OnceLock::new(),
        };
        let _ = g.chain.set(chain);
        g.detect_cells()
    }

    fn detect_cells(mut self) -> Self {
        let reps = self.orbit_reps().to_vec();
        let mut sizes: HashMap<u32, usize> = HashMap::new();
        for &r in &reps {
            *sizes.entry(r).or_default() += 1;
        }
        let mut prod = BigUint::one();
        for (_, s) in sizes {
            prod *= factorial(s);
            if prod > self.order {
                return self;
            }
        }
        if prod == self.order {
            self.cells = Some(reps);
        }
        self
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_cells((0..n as u32).collect())
    }

    pub fn symmetric(n: usize) -> Self {
        Self::from_cells(vec![0; n])
    }

    /// Direct product of the symmetric groups on the given disjoint blocks;
    /// points outside every block are fixed.
    pub fn symmetric_blocks(n: usize, blocks: &[Vec<u32>]) -> Result<Self> {
        let mut cells: Vec<u32> = (0..n as u32).collect();
        let mut seen = vec![false; n];
        for b in blocks {
            let Some(&m) = b.iter().min() else { continue };
            for &p in b {
                if p as usize >= n || seen[p as usize] {
                    return Err(Error::Invalid(format!("blocks overlap or exceed degree at {}", p)));
                }
                seen[p as usize] = true;
                cells[p as usize] = m;
            }
        }
        Ok(Self::from_cells(cells))
    }

    /// `cells[p]` is the least point of the block containing `p`.
    pub(crate) fn from_cells(cells: Vec<u32>) -> Self {
        let n = cells.len();
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); n];
        for p in 0..n {
            members[cells[p] as usize].push(p as u32);
        }
        let mut order = BigUint::one();
        let mut gens = Vec::new();
        for m in &members {
            if m.len() > 1 {
                order *= factorial(m.len());
                for w in m.windows(2) {
                    gens.push(Perm::transposition(n, w[0], w[1]));
                }
            }
        }
        let g = PermutationGroup {
            n,
            order,
            gens,
            cells: None,
            chain: OnceLock::new(),
            orbit_rep: OnceLock::new(),
            canonical: OnceLock::new(),
        };
        let _ = g.orbit_rep.set(cells.clone());
        PermutationGroup { cells: Some(cells), ..g }
    }

    fn cells_chain(&self, cells: &[u32]) -> Chain {
        let n = self.n;
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); n];
        for p in 0..n {
            members[cells[p] as usize].push(p as u32);
        }
        let mut levels = Vec::new();
        for p in 0..n as u32 {
            let m = &members[cells[p as usize] as usize];
            let rest: Vec<u32> = m.iter().copied().filter(|&q| q >= p).collect();
            if rest.len() < 2 {
                continue;
            }
            let mut lvl = Level::new(n, p);
            for &q in &rest[1..] {
                let t = Perm::transposition(n, p, q);
                lvl.pos[q as usize] = lvl.orbit.len() as u32;
                lvl.orbit.push(q);
                lvl.trans_inv.push(t.clone());
                lvl.trans.push(t);
            }
            levels.push(lvl);
        }
        let first = self.gens.iter().map(|g| g.first_moved().unwrap()).collect();
        Chain { n, gens: self.gens.clone(), first, levels }
    }

    fn chain(&self) -> &Chain {
        self.chain.get_or_init(|| match &self.cells {
            Some(c) => self.cells_chain(c),
            None => unreachable!("general groups are built with their chain"),
        })
    }

    pub fn from_generators(n: usize, gens: &[Perm]) -> Result<Self> {
        for g in gens {
            if g.len() != n {
                return Err(Error::DomainMismatch(format!(
                    "generator of degree {} in a group of degree {}",
                    g.len(),
                    n
                )));
            }
        }
        let mut c = Chain::new(n);
        for g in gens {
            c.sift_insert(g.clone());
        }
        c.close(None);
        Ok(Self::from_chain(c))
    }

    /// Builds the group generated by `gens`, whose order the caller knows.
    pub(crate) fn with_known_order<I>(n: usize, gens: I, order: &BigUint) -> Self
    where
        I: IntoIterator<Item = Perm>,
    {
        if order.is_one() {
            return Self::trivial(n);
        }
        let mut c = Chain::new(n);
        for g in gens {
            if c.sift_insert(g) && &c.order() == order {
                break;
            }
        }
        c.close(Some(order));
        debug_assert_eq!(&c.order(), order);
        Self::from_chain(c)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    /// Strong generators relative to the base `0..n`.
    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn is_symmetric_on_orbits(&self) -> bool {
        self.cells.is_some()
    }

    pub(crate) fn cells(&self) -> Option<&[u32]> {
        self.cells.as_deref()
    }

    pub fn levels(&self) -> &[Level] {
        &self.chain().levels
    }

    pub fn contains(&self, p: &Perm) -> bool {
        if p.len() != self.n {
            return false;
        }
        if let Some(c) = &self.cells {
            return (0..self.n).all(|i| c[i] == c[p.apply(i as u32) as usize]);
        }
        self.chain().contains(p)
    }

    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> bool {
        self.n == other.n && self.gens.iter().all(|g| other.contains(g))
    }

    /// For every point, the least point of its orbit.
    pub fn orbit_reps(&self) -> &[u32] {
        self.orbit_rep.get_or_init(|| {
            let mut parent: Vec<u32> = (0..self.n as u32).collect();
            fn find(p: &mut [u32], x: u32) -> u32 {
                let mut r = x;
                while p[r as usize] != r {
                    r = p[r as usize];
                }
                let mut y = x;
                while p[y as usize] != r {
                    let nx = p[y as usize];
                    p[y as usize] = r;
                    y = nx;
                }
                r
            }
            for g in &self.gens {
                for i in 0..self.n as u32 {
                    let a = find(&mut parent, i);
                    let b = find(&mut parent, g.apply(i));
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi as usize] = lo;
                    }
                }
            }
            (0..self.n as u32).map(|i| find(&mut parent, i)).collect()
        })
    }

    /// All orbits, each sorted, listed by least element.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let reps = self.orbit_reps();
        let mut out: Vec<Vec<u32>> = Vec::new();
        let mut idx = vec![usize::MAX; self.n];
        for p in 0..self.n {
            let r = reps[p] as usize;
            if idx[r] == usize::MAX {
                idx[r] = out.len();
                out.push(Vec::new());
            }
            out[idx[r]].push(p as u32);
        }
        out
    }

    pub fn orbit(&self, v: u32) -> Vec<u32> {
        let r = self.orbit_reps()[v as usize];
        (0..self.n as u32).filter(|&p| self.orbit_reps()[p as usize] == r).collect()
    }

    /// Orbits of the group restricted to the invariant subset `a`.
    pub fn orbits_within(&self, a: &[u32]) -> Vec<Vec<u32>> {
        let reps = self.orbit_reps();
        let mut groups: Vec<(u32, Vec<u32>)> = Vec::new();
        let mut idx: HashMap<u32, usize> = HashMap::new();
        for &p in a {
            let r = reps[p as usize];
            let i = *idx.entry(r).or_insert_with(|| {
                groups.push((r, Vec::new()));
                groups.len() - 1
            });
            groups[i].1.push(p);
        }
        groups.into_iter().map(|(_, mut v)| {
            v.sort_unstable();
            v
        }).collect()
    }

    pub fn is_invariant(&self, a: &[u32]) -> bool {
        let mut mark = vec![false; self.n];
        for &p in a {
            mark[p as usize] = true;
        }
        self.gens.iter().all(|g| a.iter().all(|&p| mark[g.apply(p) as usize]))
    }

    /// The orbit of `v` together with an element carrying `v` to each point.
    fn point_orbit_with_transporters(&self, v: u32) -> Vec<(u32, Perm)> {
        let mut out = vec![(v, Perm::identity(self.n))];
        let mut seen = vec![false; self.n];
        seen[v as usize] = true;
        let mut k = 0;
        while k < out.len() {
            let (x, _) = out[k];
            for g in &self.gens {
                let y = g.apply(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    let t = out[k].1.then(g);
                    out.push((y, t));
                }
            }
            k += 1;
        }
        out
    }

    /// An element mapping `v` to `w`, if one exists.
    pub fn transporter(&self, v: u32, w: u32) -> Option<Perm> {
        if v == w {
            return Some(Perm::identity(self.n));
        }
        if self.orbit_reps()[v as usize] != self.orbit_reps()[w as usize] {
            return None;
        }
        if self.cells.is_some() {
            return Some(Perm::transposition(self.n, v, w));
        }
        let c = self.chain();
        if let Ok(li) = c.level_index(v) {
            if li == 0 {
                return c.levels[0].transversal(w).cloned();
            }
        }
        self.point_orbit_with_transporters(v).into_iter().find(|(x, _)| *x == w).map(|(_, t)| t)
    }

    pub fn pointwise_stabilizer(&self, v: u32) -> PermutationGroup {
        if let Some(c) = &self.cells {
            let mut cells = c.clone();
            let old = cells[v as usize];
            let mut new_rep = None;
            for p in 0..self.n {
                if p as u32 != v && cells[p] == old {
                    let r = *new_rep.get_or_insert(p as u32);
                    cells[p] = r;
                }
            }
            cells[v as usize] = v;
            return Self::from_cells(cells);
        }
        if self.gens.iter().all(|g| g.apply(v) == v) {
            return self.clone();
        }
        let c = self.chain();
        if c.levels[0].base == v {
            let mut sub = Chain::new(self.n);
            for (g, &f) in c.gens.iter().zip(&c.first) {
                if f > v {
                    sub.gens.push(g.clone());
                    sub.first.push(f);
                }
            }
            sub.levels = c.levels[1..].to_vec();
            return Self::from_chain(sub);
        }
        let orbit = self.point_orbit_with_transporters(v);
        let target = &self.order / BigUint::from(orbit.len());
        let idx: HashMap<u32, usize> = orbit.iter().enumerate().map(|(k, (x, _))| (*x, k)).collect();
        let schreier = orbit.iter().flat_map(|(x, u)| {
            let orbit = &orbit;
            let idx = &idx;
            self.gens.iter().filter_map(move |g| {
                let ug = u.then(g);
                let w = &orbit[idx[&g.apply(*x)]].1;
                if &ug == w {
                    None
                } else {
                    Some(ug.then(&w.inverse()))
                }
            })
        });
        Self::with_known_order(self.n, schreier, &target)
    }

    pub fn pointwise_stabilizer_of(&self, pts: &[u32]) -> PermutationGroup {
        let mut g = self.clone();
        for &p in pts {
            g = g.pointwise_stabilizer(p);
        }
        g
    }

    /// The orbit of the set `a` (sorted) with an element carrying `a` onto each image.
    pub fn set_orbit(&self, a: &[u32]) -> Vec<(Vec<u32>, Perm)> {
        let mut start = a.to_vec();
        start.sort_unstable();
        let mut out = vec![(start.clone(), Perm::identity(self.n))];
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
        seen.insert(start, 0);
        let mut k = 0;
        while k < out.len() {
            for g in &self.gens {
                let mut img: Vec<u32> = out[k].0.iter().map(|&p| g.apply(p)).collect();
                img.sort_unstable();
                if !seen.contains_key(&img) {
                    seen.insert(img.clone(), out.len());
                    let t = out[k].1.then(g);
                    out.push((img, t));
                }
            }
            k += 1;
        }
        out
    }

    pub fn setwise_stabilizer(&self, a: &[u32]) -> PermutationGroup {
        if let Some(c) = &self.cells {
            let mut mark = vec![false; self.n];
            for &p in a {
                mark[p as usize] = true;
            }
            let mut rep_in: HashMap<u32, u32> = HashMap::new();
            let mut rep_out: HashMap<u32, u32> = HashMap::new();
            let mut cells = c.clone();
            for p in 0..self.n {
                let table = if mark[p] { &mut rep_in } else { &mut rep_out };
                cells[p] = *table.entry(c[p]).or_insert(p as u32);
            }
            return Self::from_cells(cells);
        }
        let mut mark = vec![false; self.n];
        for &p in a {
            mark[p as usize] = true;
        }
        if self.gens.iter().all(|g| a.iter().all(|&p| mark[g.apply(p) as usize])) {
            return self.clone();
        }
        let orbit = self.set_orbit(a);
        let target = &self.order / BigUint::from(orbit.len());
        let idx: HashMap<&[u32], usize> =
            orbit.iter().enumerate().map(|(k, (s, _))| (s.as_slice(), k)).collect();
        let schreier = orbit.iter().flat_map(|(s, u)| {
            let orbit = &orbit;
            let idx = &idx;
            self.gens.iter().filter_map(move |g| {
                let mut img: Vec<u32> = s.iter().map(|&p| g.apply(p)).collect();
                img.sort_unstable();
                let ug = u.then(g);
                let w = &orbit[idx[img.as_slice()]].1;
                if &ug == w {
                    None
                } else {
                    Some(ug.then(&w.inverse()))
                }
            })
        });
        Self::with_known_order(self.n, schreier, &target)
    }

    /// Stabilizer of each set of the tuple.
    pub fn setwise_stabilizer_tuple(&self, sets: &[Vec<u32>]) -> PermutationGroup {
        let mut g = self.clone();
        for s in sets {
            g = g.setwise_stabilizer(s);
        }
        g
    }

    /// `sigma^-1 G sigma`: the group with its points renamed through `sigma`.
    pub fn conjugate(&self, sigma: &Perm) -> PermutationGroup {
        if let Some(c) = &self.cells {
            let mut cells = vec![0u32; self.n];
            let mut rep: HashMap<u32, u32> = HashMap::new();
            let mut order: Vec<(u32, u32)> =
                (0..self.n as u32).map(|p| (sigma.apply(p), c[p as usize])).collect();
            order.sort_unstable();
            for (q, cell) in order {
                cells[q as usize] = *rep.entry(cell).or_insert(q);
            }
            return Self::from_cells(cells);
        }
        if sigma.is_identity() {
            return self.clone();
        }
        let gens: Vec<Perm> = self.gens.iter().map(|g| sigma.conjugating(g)).collect();
        Self::with_known_order(self.n, gens, &self.order)
    }

    /// Direct product acting on `0..a.n` and `a.n..a.n+b.n`.
    pub fn direct_product(a: &PermutationGroup, b: &PermutationGroup) -> PermutationGroup {
        let n = a.n + b.n;
        if let (Some(ca), Some(cb)) = (&a.cells, &b.cells) {
            let mut cells = ca.clone();
            cells.extend(cb.iter().map(|&x| x + a.n as u32));
            return Self::from_cells(cells);
        }
        let (chain_a, chain_b) = (a.chain(), b.chain());
        let mut c = Chain::new(n);
        for (g, &f) in chain_a.gens.iter().zip(&chain_a.first) {
            c.gens.push(g.embed(n, 0));
            c.first.push(f);
        }
        for (g, &f) in chain_b.gens.iter().zip(&chain_b.first) {
            c.gens.push(g.embed(n, a.n));
            c.first.push(f + a.n as u32);
        }
        for (lvl, off) in chain_a.levels.iter().map(|l| (l, 0)).chain(chain_b.levels.iter().map(|l| (l, a.n))) {
            let mut pos = vec![NONE; n];
            for (k, &p) in lvl.orbit.iter().enumerate() {
                pos[p as usize + off] = k as u32;
            }
            c.levels.push(Level {
                base: lvl.base + off as u32,
                orbit: lvl.orbit.iter().map(|&p| p + off as u32).collect(),
                pos,
                trans: lvl.trans.iter().map(|t| t.embed(n, off)).collect(),
                trans_inv: lvl.trans_inv.iter().map(|t| t.embed(n, off)).collect(),
            });
        }
        Self::from_chain(c)
    }

    /// Restriction to the invariant sorted subset `sub`, renumbered to `0..sub.len()`.
    /// `injective` promises that only the identity fixes `sub` pointwise.
    pub fn restrict(&self, sub: &[u32], injective: bool) -> PermutationGroup {
        let m = sub.len();
        let mut index_of = vec![NONE; self.n];
        for (k, &p) in sub.iter().enumerate() {
            index_of[p as usize] = k as u32;
        }
        if let Some(c) = &self.cells {
            let mut cells = vec![0u32; m];
            let mut rep: HashMap<u32, u32> = HashMap::new();
            for (k, &p) in sub.iter().enumerate() {
                cells[k] = *rep.entry(c[p as usize]).or_insert(k as u32);
            }
            return Self::from_cells(cells);
        }
        let gens: Vec<Perm> = self.gens.iter().map(|g| g.restrict(sub, &index_of)).collect();
        if injective {
            Self::with_known_order(m, gens, &self.order)
        } else {
            Self::from_generators(m, &gens).expect("restricted generators share a degree")
        }
    }

    /// Least element of `{h * r : h in G}`, where `h` acts first.
    pub fn lexmin_coset(&self, r: &Perm) -> Perm {
        if let Some(c) = &self.cells {
            let mut members: HashMap<u32, Vec<u32>> = HashMap::new();
            for p in 0..self.n as u32 {
                members.entry(c[p as usize]).or_default().push(p);
            }
            let mut out = vec![0u32; self.n];
            for (_, pts) in members {
                let mut vals: Vec<u32> = pts.iter().map(|&p| r.apply(p)).collect();
                vals.sort_unstable();
                for (p, v) in pts.into_iter().zip(vals) {
                    out[p as usize] = v;
                }
            }
            return Perm::from_images_unchecked(out);
        }
        self.chain().lexmin_from(0, r)
    }

    /// For each level in base order and each orbit point in increasing order,
    /// the least element of the level group carrying the base to that point.
    pub fn canonical_chain(&self) -> Vec<(u32, Vec<(u32, Perm)>)> {
        let c = self.chain();
        c.levels
            .iter()
            .enumerate()
            .map(|(li, lvl)| {
                let mut pts = lvl.orbit.clone();
                pts.sort_unstable();
                let reps = pts
                    .into_iter()
                    .map(|b| {
                        let t = &lvl.trans[lvl.pos[b as usize] as usize];
                        (b, c.lexmin_from(li + 1, t))
                    })
                    .collect();
                (lvl.base, reps)
            })
            .collect()
    }

    /// The canonical strong generating set: the non-identity canonical
    /// transversal elements in chain order.
    pub fn canonical_generators(&self) -> &[Perm] {
        self.canonical.get_or_init(|| {
            self.canonical_chain()
                .into_iter()
                .flat_map(|(base, reps)| reps.into_iter().filter(move |(b, _)| *b != base).map(|(_, p)| p))
                .collect()
        })
    }

    /// Representatives of the left cosets `tH`, each the least element of its
    /// coset, in increasing order.
    pub fn left_cosets(&self, h: &PermutationGroup) -> Result<Vec<Perm>> {
        if !h.is_subgroup_of(self) {
            return Err(Error::Precondition("left_cosets needs a subgroup".into()));
        }
        let index = (&self.order / &h.order).to_usize().ok_or_else(|| {
            Error::BudgetExceeded("subgroup index does not fit in memory".into())
        })?;
        let mut reps: Vec<Perm> = vec![Perm::identity(self.n)];
        let mut k = 0;
        while k < reps.len() && reps.len() < index {
            for g in &self.gens {
                let cand = g.then(&reps[k]);
                let cinv = cand.inverse();
                if !reps.iter().any(|r| h.contains(&cinv.then(r))) {
                    reps.push(cand);
                }
            }
            k += 1;
        }
        let mut out: Vec<Perm> = reps
            .into_iter()
            .map(|t| h.conjugate(&t.inverse()).lexmin_coset(&t))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Least element of `{h * r1 : h in self}` outside `{h * r2 : h in other}`.
    pub fn min_coset_difference(&self, r1: &Perm, other: &PermutationGroup, r2: &Perm) -> Option<Perm> {
        let c1 = self.chain();
        let c2 = other.chain();
        let sub_gens: Vec<(u32, &Perm)> = c1.first.iter().copied().zip(c1.gens.iter()).collect();
        descend(c1, &sub_gens, 0, r1.clone(), c2, 0, Some(r2.clone()), other, 0)
    }

    /// All elements, if there are at most `cap`.
    pub fn elements(&self, cap: usize) -> Option<Vec<Perm>> {
        if self.order > BigUint::from(cap) {
            return None;
        }
        let c = self.chain();
        let mut out = vec![Perm::identity(self.n)];
        for lvl in c.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * lvl.orbit.len());
            for h in &out {
                for t in &lvl.trans {
                    next.push(h.then(t));
                }
            }
            out = next;
        }
        Some(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn descend(
    c1: &Chain,
    gens1: &[(u32, &Perm)],
    l1: usize,
    r1: Perm,
    c2: &Chain,
    l2: usize,
    r2: Option<Perm>,
    g2: &PermutationGroup,
    j: usize,
) -> Option<Perm> {
    let Some(r2) = r2 else {
        return Some(c1.lexmin_from(l1, &r1));
    };
    if j == c1.n {
        return if r1 == r2 { None } else { Some(r1) };
    }
    let r2_inv = r2.inverse();
    let diff = r1.then(&r2_inv);
    if g2.contains(&diff) && gens1.iter().all(|(f, g)| (*f as usize) < j || g2.contains(g)) {
        return None;
    }
    let lvl1 = c1.levels.get(l1).filter(|l| l.base as usize == j);
    let lvl2 = c2.levels.get(l2).filter(|l| l.base as usize == j);
    let mut cands: Vec<(u32, usize)> = match lvl1 {
        Some(l) => l.orbit.iter().enumerate().map(|(k, &b)| (r1.apply(b), k)).collect(),
        None => vec![(r1.apply(j as u32), 0)],
    };
    cands.sort_unstable();
    let nl1 = l1 + lvl1.is_some() as usize;
    let nl2 = l2 + lvl2.is_some() as usize;
    for (y, k) in cands {
        let nr1 = match lvl1 {
            Some(l) => l.trans[k].then(&r1),
            None => r1.clone(),
        };
        let gamma = r2_inv.apply(y);
        let nr2 = match lvl2 {
            Some(l) => match l.pos[gamma as usize] {
                NONE => None,
                kk => Some(l.trans[kk as usize].then(&r2)),
            },
            None => (gamma as usize == j).then(|| r2.clone()),
        };
        if let Some(found) = descend(c1, gens1, nl1, nr1, c2, nl2, nr2, g2, j + 1) {
            return Some(found);
        }
    }
    None
}
