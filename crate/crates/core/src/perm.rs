use std::fmt;

use crate::error::Error;

/// A permutation of `0..n`, stored as its image array.
///
/// Products are read left to right: `p.then(q)` maps `v` to `q(p(v))`.
/// The derived ordering is the lexicographic order of image arrays.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u32]>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, Error> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(format!(
                    "image array {:?} is not a bijection of 0..{}",
                    truncate(&images),
                    n
                )));
            }
            seen[x] = true;
        }
        Ok(Perm { images: images.into_boxed_slice() })
    }

    /// Caller guarantees `images` is a bijection.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Perm::from_images(images.clone()).is_ok());
        Perm { images: images.into_boxed_slice() }
    }

    /// Builds a permutation from disjoint cycles over `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self, Error> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (k, &a) in cyc.iter().enumerate() {
                let b = cyc[(k + 1) % cyc.len()];
                if a as usize >= n || b as usize >= n || touched[a as usize] {
                    return Err(Error::NotAPermutation(format!("bad cycle {:?}", cyc)));
                }
                touched[a as usize] = true;
                images[a as usize] = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn transposition(n: usize, a: u32, b: u32) -> Self {
        let mut images: Vec<u32> = (0..n as u32).collect();
        images.swap(a as usize, b as usize);
        Perm { images: images.into_boxed_slice() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: u32) -> u32 {
        self.images[v as usize]
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self` first, then `q`.
    pub fn then(&self, q: &Perm) -> Perm {
        debug_assert_eq!(self.len(), q.len());
        Perm { images: self.images.iter().map(|&x| q.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv.into_boxed_slice() }
    }

    /// `self^-1 g self`, i.e. `g` with its points renamed through `self`.
    pub fn conjugating(&self, g: &Perm) -> Perm {
        let mut out = vec![0u32; self.len()];
        for (i, &x) in g.images.iter().enumerate() {
            out[self.images[i] as usize] = self.images[x as usize];
        }
        Perm { images: out.into_boxed_slice() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Smallest moved point at or after `from`.
    pub fn first_moved_from(&self, from: usize) -> Option<u32> {
        (from..self.len()).find(|&i| self.images[i] != i as u32).map(|i| i as u32)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.first_moved_from(0)
    }

    pub fn power(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// Embeds into `0..total` with the points shifted by `offset`; other points are fixed.
    pub fn embed(&self, total: usize, offset: usize) -> Perm {
        let mut images: Vec<u32> = (0..total as u32).collect();
        for (i, &x) in self.images.iter().enumerate() {
            images[i + offset] = x + offset as u32;
        }
        Perm { images: images.into_boxed_slice() }
    }

    /// Restriction to an invariant, sorted subset, renumbered to `0..sub.len()`.
    pub fn restrict(&self, sub: &[u32], index_of: &[u32]) -> Perm {
        Perm {
            images: sub.iter().map(|&v| index_of[self.apply(v) as usize]).collect(),
        }
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start as u32 {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cyc.push(x);
                x = self.apply(x);
            }
            out.push(cyc);
        }
        out
    }
}

fn truncate(v: &[u32]) -> Vec<u32> {
    v.iter().copied().take(16).collect()
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, x) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
