//! Finite models of tree automorphisms.
//!
//! A [`Portrait`] of depth `m` records the swap sign `ε_v ∈ {0, 1}` of every
//! vertex `v` with `|v| < m`. It is exactly an element of the finite group
//! `A_m` of automorphisms with no swaps at level `m` or below, and it also
//! describes the action of any automorphism on the first `m` levels.
//!
//! Signs are stored as a flat bit array in heap order: the root has index 0
//! and the children `v0`, `v1` of index `i` sit at `2i + 1` and `2i + 2`.
//!
//! Multiplication acts on the left throughout: `p · q` applies `p` first,
//! so `(p · q)(v) = q(p(v))`.
//!
//! # Text format
//!
//! A depth-`m` portrait prints as `m` groups of `0`/`1` separated by `|`;
//! group `k` has `2^k` characters giving the signs of level `k` in
//! lexicographic vertex order. The depth-2 portrait of `a` is `1|00`, and the
//! depth-0 portrait is the empty string.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest depth accepted for single-portrait operations.
pub const MAX_DEPTH: u32 = 24;
/// Default cap for enumerating the whole group `A_m`.
pub const DEFAULT_ENUMERATION_CAP: u32 = 4;

/// A tree vertex `x₁x₂…x_k`, the root being the empty sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    level: u32,
    /// Bits with `x₁` as the most significant of the low `level` bits.
    path: u64,
}

impl Vertex {
    pub const ROOT: Vertex = Vertex { level: 0, path: 0 };

    pub fn from_bits(bits: &[bool]) -> Self {
        assert!(bits.len() <= 63, "vertex deeper than 63 levels");
        let path = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Vertex {
            level: bits.len() as u32,
            path,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.level)
            .map(|i| (self.path >> (self.level - 1 - i)) & 1 == 1)
            .collect()
    }

    /// The child `v x`.
    pub fn child(&self, bit: bool) -> Vertex {
        Vertex {
            level: self.level + 1,
            path: (self.path << 1) | bit as u64,
        }
    }

    /// Position of the vertex within its level, in lexicographic order.
    pub fn offset(&self) -> u64 {
        self.path
    }

    /// Heap index `2^level - 1 + offset`.
    pub fn heap_index(&self) -> usize {
        ((1usize << self.level) - 1) + self.path as usize
    }

    pub fn from_heap_index(index: usize) -> Vertex {
        let level = usize::BITS - 1 - (index + 1).leading_zeros();
        Vertex {
            level,
            path: (index + 1 - (1usize << level)) as u64,
        }
    }

    /// The vertex `1^k 0` used by the direct definition of `b`, `c`, `d`.
    pub fn ones_then_zero(k: u32) -> Vertex {
        Vertex {
            level: k + 1,
            path: ((1u64 << k) - 1) << 1,
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "r" {
            return Ok(Vertex::ROOT);
        }
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::VertexSyntax(format!(
                    "unexpected character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.len() > 63 {
            return Err(Error::VertexSyntax("more than 63 levels".into()));
        }
        Ok(Vertex::from_bits(&bits))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            return f.write_str("r");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    depth: u32,
    bits: Vec<u64>,
}

#[inline]
fn sign_count(depth: u32) -> usize {
    (1usize << depth) - 1
}

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::CapExceeded {
            what: "portrait depth",
            requested: depth as u64,
            cap: MAX_DEPTH as u64,
        });
    }
    Ok(())
}

impl Portrait {
    pub fn identity(depth: u32) -> Result<Self> {
        check_depth(depth)?;
        Ok(Self::zeroed(depth))
    }

    fn zeroed(depth: u32) -> Self {
        Portrait {
            depth,
            bits: vec![0; sign_count(depth).div_ceil(64)],
        }
    }

    /// The swap `a_v` of the two branches below `v`, as a depth-`depth` portrait.
    pub fn swap_at(v: Vertex, depth: u32) -> Result<Self> {
        check_depth(depth)?;
        if v.level >= depth {
            return Err(Error::DepthExceeded {
                level: v.level,
                depth,
            });
        }
        let mut p = Self::zeroed(depth);
        p.set(v.heap_index(), true);
        Ok(p)
    }

    /// Builds a portrait from a sign function on vertices of level `< depth`.
    pub fn from_fn(depth: u32, mut sign: impl FnMut(Vertex) -> bool) -> Result<Self> {
        check_depth(depth)?;
        let mut p = Self::zeroed(depth);
        for i in 0..sign_count(depth) {
            if sign(Vertex::from_heap_index(i)) {
                p.set(i, true);
            }
        }
        Ok(p)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    #[inline]
    pub(crate) fn get(&self, index: usize) -> bool {
        (self.bits[index >> 6] >> (index & 63)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, index: usize, value: bool) {
        let mask = 1u64 << (index & 63);
        if value {
            self.bits[index >> 6] |= mask;
        } else {
            self.bits[index >> 6] &= !mask;
        }
    }

    #[inline]
    fn flip(&mut self, index: usize) {
        self.bits[index >> 6] ^= 1u64 << (index & 63);
    }

    /// Sign `ε_v`; `None` when `v` is at or below the portrait depth.
    pub fn sign(&self, v: Vertex) -> Option<bool> {
        (v.level < self.depth).then(|| self.get(v.heap_index()))
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Raw storage words, low bit first in heap order; used for hashing and caching.
    pub fn raw_words(&self) -> &[u64] {
        &self.bits
    }

    pub fn from_raw_words(depth: u32, words: Vec<u64>) -> Result<Self> {
        check_depth(depth)?;
        let n = sign_count(depth);
        if words.len() != n.div_ceil(64) {
            return Err(Error::PortraitSyntax(format!(
                "expected {} storage words for depth {depth}, got {}",
                n.div_ceil(64),
                words.len()
            )));
        }
        if !n.is_multiple_of(64) {
            let tail = words[words.len() - 1] >> (n % 64);
            if tail != 0 {
                return Err(Error::PortraitSyntax(
                    "bits set beyond the last vertex".into(),
                ));
            }
        }
        Ok(Portrait { depth, bits: words })
    }

    pub fn apply(&self, v: Vertex) -> Result<Vertex> {
        if v.level > self.depth {
            return Err(Error::DepthExceeded {
                level: v.level,
                depth: self.depth,
            });
        }
        let mut image = 0u64;
        let mut prefix = Vertex::ROOT;
        for bit in v.bits() {
            let flipped = bit ^ self.get(prefix.heap_index());
            image = (image << 1) | flipped as u64;
            prefix = prefix.child(bit);
        }
        Ok(Vertex {
            level: v.level,
            path: image,
        })
    }

    /// Left product: apply `self`, then `other`.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: other.depth,
            });
        }
        let mut out = Portrait::zeroed(self.depth);
        // images[j] = offset of self(v) for the j-th vertex v of the current level
        let mut images: Vec<u32> = vec![0];
        let mut next: Vec<u32> = Vec::new();
        for level in 0..self.depth {
            let base = (1usize << level) - 1;
            next.clear();
            next.reserve(images.len() * 2);
            for (j, &img) in images.iter().enumerate() {
                let s = self.get(base + j);
                if s ^ other.get(base + img as usize) {
                    out.set(base + j, true);
                }
                let child = img << 1;
                next.push(child | s as u32);
                next.push(child | !s as u32);
            }
            std::mem::swap(&mut images, &mut next);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Portrait {
        // ε_v(p⁻¹) = ε_{p⁻¹(v)}(p): walk p forward and write each sign at the image.
        let mut out = Portrait::zeroed(self.depth);
        let mut images: Vec<u32> = vec![0];
        let mut next: Vec<u32> = Vec::new();
        for level in 0..self.depth {
            let base = (1usize << level) - 1;
            next.clear();
            for (j, &img) in images.iter().enumerate() {
                let s = self.get(base + j);
                if s {
                    out.set(base + img as usize, true);
                }
                let child = img << 1;
                next.push(child | s as u32);
                next.push(child | !s as u32);
            }
            std::mem::swap(&mut images, &mut next);
        }
        out
    }

    /// Multiplicative order, by repeated composition.
    pub fn order(&self) -> u64 {
        let mut power = self.clone();
        let mut k = 1u64;
        while !power.is_identity() {
            power = power.compose(self).expect("same depth");
            k += 1;
        }
        k
    }

    /// Truncation to a smaller depth.
    pub fn truncate(&self, depth: u32) -> Result<Portrait> {
        if depth > self.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: depth,
            });
        }
        let mut out = Portrait::zeroed(depth);
        for i in 0..sign_count(depth) {
            if self.get(i) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `φ(p0, p1; σ)`: acts as `p0` on the left branch and `p1` on the right,
    /// followed by the root swap when `swap` is set.
    pub fn wreath_compose(p0: &Portrait, p1: &Portrait, swap: bool) -> Result<Portrait> {
        if p0.depth != p1.depth {
            return Err(Error::DepthMismatch {
                left: p0.depth,
                right: p1.depth,
            });
        }
        check_depth(p0.depth + 1)?;
        let mut out = Portrait::zeroed(p0.depth + 1);
        out.set(0, swap);
        for level in 0..p0.depth {
            let src = (1usize << level) - 1;
            let width = 1usize << level;
            let dst = (1usize << (level + 1)) - 1;
            for j in 0..width {
                if p0.get(src + j) {
                    out.set(dst + j, true);
                }
                if p1.get(src + j) {
                    out.set(dst + width + j, true);
                }
            }
        }
        Ok(out)
    }

    /// `ψ = φ⁻¹`: the two branch portraits and the root swap.
    pub fn wreath_split(&self) -> Result<(Portrait, Portrait, bool)> {
        if self.depth == 0 {
            return Err(Error::EmptyPortrait);
        }
        let d = self.depth - 1;
        let mut p0 = Portrait::zeroed(d);
        let mut p1 = Portrait::zeroed(d);
        for level in 0..d {
            let dst = (1usize << level) - 1;
            let width = 1usize << level;
            let src = (1usize << (level + 1)) - 1;
            for j in 0..width {
                if self.get(src + j) {
                    p0.set(dst + j, true);
                }
                if self.get(src + width + j) {
                    p1.set(dst + j, true);
                }
            }
        }
        Ok((p0, p1, self.get(0)))
    }

    /// Restriction to the subtree below `v`, as a portrait of depth `depth - |v|`.
    pub fn section(&self, v: Vertex) -> Result<Portrait> {
        if v.level > self.depth {
            return Err(Error::DepthExceeded {
                level: v.level,
                depth: self.depth,
            });
        }
        let d = self.depth - v.level;
        let mut out = Portrait::zeroed(d);
        for level in 0..d {
            let width = 1usize << level;
            let dst = width - 1;
            let src = (1usize << (level + v.level)) - 1 + ((v.path as usize) << level);
            for j in 0..width {
                if self.get(src + j) {
                    out.set(dst + j, true);
                }
            }
        }
        Ok(out)
    }

    /// Flips the sign at `v` in place (right multiplication by `a_v` when
    /// `self` fixes `v`).
    pub(crate) fn toggle(&mut self, v: Vertex) {
        self.flip(v.heap_index());
    }
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait({self})")
    }
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for level in 0..self.depth {
            if level > 0 {
                f.write_str("|")?;
            }
            let base = (1usize << level) - 1;
            for j in 0..(1usize << level) {
                f.write_str(if self.get(base + j) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for Portrait {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Portrait::zeroed(0));
        }
        let levels: Vec<&str> = s.split('|').collect();
        let depth = levels.len() as u32;
        check_depth(depth)?;
        let mut p = Portrait::zeroed(depth);
        for (level, group) in levels.iter().enumerate() {
            let width = 1usize << level;
            if group.len() != width {
                return Err(Error::PortraitSyntax(format!(
                    "level {level} has {} signs, expected {width}",
                    group.len()
                )));
            }
            for (j, ch) in group.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => p.set(width - 1 + j, true),
                    other => {
                        return Err(Error::PortraitSyntax(format!(
                            "unexpected character {other:?} at level {level}"
                        )))
                    }
                }
            }
        }
        Ok(p)
    }
}

/// The isomorphism `ι_v` from automorphisms of the whole tree onto those
/// supported on the subtree below `anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubtreeEmbedding {
    pub anchor: Vertex,
}

impl SubtreeEmbedding {
    pub fn new(anchor: Vertex) -> Self {
        SubtreeEmbedding { anchor }
    }

    /// Embeds a depth-`m` portrait as a depth `m + |anchor|` portrait trivial off the subtree.
    pub fn embed(&self, p: &Portrait) -> Result<Portrait> {
        let depth = p.depth + self.anchor.level;
        check_depth(depth)?;
        let mut out = Portrait::zeroed(depth);
        for level in 0..p.depth {
            let width = 1usize << level;
            let src = width - 1;
            let dst = (1usize << (level + self.anchor.level)) - 1
                + ((self.anchor.path as usize) << level);
            for j in 0..width {
                if p.get(src + j) {
                    out.set(dst + j, true);
                }
            }
        }
        Ok(out)
    }
}

/// BFS closure of `generators` under right multiplication, starting at the identity.
pub(crate) fn closure(depth: u32, generators: &[Portrait]) -> Result<HashSet<Portrait>> {
    let start = Portrait::identity(depth)?;
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for g in generators {
            let q = p.compose(g)?;
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    Ok(seen)
}

/// The full group `A_m`, generated by the swaps `a_v` with `|v| < m`.
pub fn enumerate_am(m: u32) -> Result<HashSet<Portrait>> {
    enumerate_am_with_cap(m, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_am_with_cap(m: u32, cap: u32) -> Result<HashSet<Portrait>> {
    if m > cap {
        return Err(Error::CapExceeded {
            what: "A_m enumeration depth",
            requested: m as u64,
            cap: cap as u64,
        });
    }
    let generators = (0..sign_count(m))
        .map(|i| Portrait::swap_at(Vertex::from_heap_index(i), m))
        .collect::<Result<Vec<_>>>()?;
    closure(m, &generators)
}

/// Depth-`m` truncation of the automorphism whose only swaps sit at the vertices `1^k`.
pub fn infinite_order_witness(m: u32) -> Result<Portrait> {
    if m == 0 {
        return Err(Error::Domain("witness depth must be at least 1".into()));
    }
    let mut p = Portrait::identity(m)?;
    let mut v = Vertex::ROOT;
    for _ in 0..m {
        p.toggle(v);
        v = v.child(true);
    }
    Ok(p)
}
