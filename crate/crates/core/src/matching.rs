//! The perfect matching graph `M_n` and the families `H^(p,s)(n)`.
//!
//! A member is stored as a `2n`-bit mask: slot `2i` holds `l_{i+1}` and slot
//! `2i + 1` holds `r_{i+1}`. Edge indices are 0-based in code and 1-based in
//! every rendered form (`"l3"`, `"r3"`).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest edge count supported by enumeration-based operations.
pub const MAX_EDGES: usize = 16;

const LEFT_SLOTS: u32 = 0x5555_5555;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A vertex of `M_n`, ordered by slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    slot: u8,
}

impl Vertex {
    pub fn new(edge: usize, side: Side) -> Vertex {
        assert!(edge < MAX_EDGES, "edge index {edge} out of range");
        let slot = 2 * edge + usize::from(side == Side::Right);
        Vertex { slot: slot as u8 }
    }

    pub fn left(edge: usize) -> Vertex {
        Vertex::new(edge, Side::Left)
    }

    pub fn right(edge: usize) -> Vertex {
        Vertex::new(edge, Side::Right)
    }

    pub fn from_slot(slot: usize) -> Vertex {
        assert!(slot < 2 * MAX_EDGES, "slot {slot} out of range");
        Vertex { slot: slot as u8 }
    }

    /// 0-based edge index.
    pub fn edge(self) -> usize {
        usize::from(self.slot / 2)
    }

    pub fn side(self) -> Side {
        if self.slot.is_multiple_of(2) {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn slot(self) -> usize {
        usize::from(self.slot)
    }

    pub fn bit(self) -> u32 {
        1 << self.slot
    }

    /// The other endpoint of the same edge.
    pub fn partner(self) -> Vertex {
        Vertex { slot: self.slot ^ 1 }
    }

    pub fn check(self, n: usize) -> Result<Vertex> {
        if self.edge() < n {
            Ok(self)
        } else {
            Err(Error::InvalidVertex(format!("{self} is not a vertex of M_{n}")))
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.side() {
            Side::Left => 'l',
            Side::Right => 'r',
        };
        write!(f, "{}{}", c, self.edge() + 1)
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Vertex> {
        let bad = || Error::InvalidVertex(s.to_string());
        let mut chars = s.chars();
        let side = match chars.next() {
            Some('l') | Some('L') => Side::Left,
            Some('r') | Some('R') => Side::Right,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 || index > MAX_EDGES {
            return Err(bad());
        }
        Ok(Vertex::new(index - 1, side))
    }
}

impl Serialize for Vertex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `M_n`: `n` disjoint edges `e_i = {l_i, r_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatchingGraph {
    n: usize,
}

impl MatchingGraph {
    pub fn new(n: usize) -> Result<MatchingGraph> {
        if n == 0 || n > MAX_EDGES {
            return Err(Error::UnsupportedSize(n, MAX_EDGES));
        }
        Ok(MatchingGraph { n })
    }

    pub fn edges(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..2 * self.n).map(Vertex::from_slot)
    }

    pub fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        a.edge() < self.n && a.partner() == b
    }

    pub fn full_mask(&self) -> u32 {
        full_mask(self.n)
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 16 {
        u32::MAX
    } else {
        (1u32 << (2 * n)) - 1
    }
}

/// Number of full edges `p` and singletons `s` in a member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature {
    pub p: usize,
    pub s: usize,
}

impl Signature {
    pub fn new(p: usize, s: usize) -> Signature {
        Signature { p, s }
    }

    /// Vertex count `2p + s`.
    pub fn order(&self) -> usize {
        2 * self.p + self.s
    }

    /// Number of edges touched, `p + s`.
    pub fn span(&self) -> usize {
        self.p + self.s
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let reject = |reason| {
            Err(Error::InvalidSignature {
                n,
                p: self.p,
                s: self.s,
                reason,
            })
        };
        if self.order() == 0 {
            return reject("2p+s must be at least 1");
        }
        if self.span() > n {
            return reject("p+s > n");
        }
        Ok(())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.s)
    }
}

/// A member of some `H^(p,s)(n)`, i.e. a vertex subset of `M_n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgraph {
    n: u8,
    mask: u32,
}

impl Subgraph {
    pub fn from_mask(n: usize, mask: u32) -> Result<Subgraph> {
        MatchingGraph::new(n)?;
        if mask & !full_mask(n) != 0 {
            return Err(Error::InvalidSubgraph(format!(
                "mask {mask:#x} has bits beyond 2n={}",
                2 * n
            )));
        }
        Ok(Subgraph { n: n as u8, mask })
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(n: usize, vertices: I) -> Result<Subgraph> {
        let mut mask = 0;
        for v in vertices {
            mask |= v.check(n)?.bit();
        }
        Subgraph::from_mask(n, mask)
    }

    pub(crate) fn from_mask_unchecked(n: usize, mask: u32) -> Subgraph {
        debug_assert!(mask & !full_mask(n) == 0);
        Subgraph { n: n as u8, mask }
    }

    pub fn n(&self) -> usize {
        usize::from(self.n)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Edge bitmask (bit `i` for `e_{i+1}`) of edges with both endpoints present.
    pub fn full_edges(&self) -> u32 {
        let (l, r) = self.sides();
        compress_even(l & r)
    }

    /// Edge bitmask of edges with exactly one endpoint present.
    pub fn singleton_edges(&self) -> u32 {
        let (l, r) = self.sides();
        compress_even(l ^ r)
    }

    /// Edge bitmask of every edge the subgraph touches.
    pub fn support(&self) -> u32 {
        let (l, r) = self.sides();
        compress_even(l | r)
    }

    fn sides(&self) -> (u32, u32) {
        (self.mask & LEFT_SLOTS, (self.mask >> 1) & LEFT_SLOTS)
    }

    pub fn signature(&self) -> Signature {
        Signature::new(
            self.full_edges().count_ones() as usize,
            self.singleton_edges().count_ones() as usize,
        )
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.mask & v.bit() != 0
    }

    /// Vertices in slot order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        BitIter(self.mask).map(|slot| Vertex::from_slot(slot as usize))
    }

    pub fn intersects(&self, other: &Subgraph) -> Result<bool> {
        self.same_graph(other)?;
        Ok(self.mask & other.mask != 0)
    }

    /// The subgraph on `V(M_n) \ V(self)`; its signature is `(n-p-s, s)`.
    pub fn complement(&self) -> Subgraph {
        Subgraph {
            n: self.n,
            mask: !self.mask & full_mask(self.n()),
        }
    }

    fn same_graph(&self, other: &Subgraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::MismatchedGraphs(self.n(), other.n()));
        }
        Ok(())
    }

    /// Parses `"l1 r1 l2"`.
    pub fn parse(n: usize, text: &str) -> Result<Subgraph> {
        let vertices = text
            .split_whitespace()
            .map(Vertex::from_str)
            .collect::<Result<Vec<_>>>()?;
        if vertices.is_empty() {
            return Err(Error::InvalidSubgraph("empty vertex list".into()));
        }
        Subgraph::from_vertices(n, vertices)
    }

    pub fn hex(&self) -> String {
        format!("{:#x}", self.mask)
    }

    pub fn tokens(&self) -> Vec<String> {
        self.vertices().map(|v| v.to_string()).collect()
    }
}

impl fmt::Display for Subgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Subgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Serialized form used in reports: sorted vertex tokens plus the hex mask.
impl Serialize for Subgraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Subgraph", 2)?;
        st.serialize_field("vertices", &self.tokens())?;
        st.serialize_field("mask", &self.hex())?;
        st.end()
    }
}

/// Packs bits 0, 2, 4, ... of `x` into bits 0, 1, 2, ...
fn compress_even(x: u32) -> u32 {
    let mut x = x & LEFT_SLOTS;
    x = (x | (x >> 1)) & 0x3333_3333;
    x = (x | (x >> 2)) & 0x0f0f_0f0f;
    x = (x | (x >> 4)) & 0x00ff_00ff;
    x = (x | (x >> 8)) & 0x0000_ffff;
    x
}

/// Iterates the set bit positions of a word, lowest first.
#[derive(Clone, Copy, Debug)]
pub struct BitIter(pub u32);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(tz)
    }
}

pub fn intersects(f: &Subgraph, g: &Subgraph) -> Result<bool> {
    f.intersects(g)
}

pub fn complement(f: &Subgraph) -> Subgraph {
    f.complement()
}

/// Pairwise check; the empty family is vacuously intersecting.
pub fn is_intersecting_family(family: &[Subgraph]) -> Result<bool> {
    if let Some(first) = family.first() {
        for g in family {
            first.same_graph(g)?;
        }
    }
    Ok(family
        .iter()
        .enumerate()
        .all(|(i, f)| family[i + 1..].iter().all(|g| f.mask & g.mask != 0)))
}

/// Streams `H^(p,s)(n)` in ascending mask order.
///
/// The mask is read as a base-4 number whose digit `i` is the state of edge
/// `i` (0 absent, 1 = `l` only, 2 = `r` only, 3 = both), so the stream is the
/// ascending sequence of base-4 numbers with `p` threes, `s` ones-or-twos and
/// zeros elsewhere.
#[derive(Clone, Debug)]
pub struct FamilyIter {
    n: usize,
    digits: Vec<u8>,
    pending: bool,
}

impl FamilyIter {
    fn new(n: usize, sig: Signature) -> FamilyIter {
        let mut digits = vec![0u8; n];
        fill_minimal(&mut digits[..], sig.p, sig.s);
        FamilyIter {
            n,
            digits,
            pending: true,
        }
    }

    fn current(&self) -> Subgraph {
        let mask = self
            .digits
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &d)| m | (u32::from(d) << (2 * i)));
        Subgraph::from_mask_unchecked(self.n, mask)
    }

    fn advance(&mut self) -> bool {
        let (mut full, mut single) = (0usize, 0usize);
        for j in 0..self.n {
            let d = self.digits[j];
            match d {
                3 => full += 1,
                1 | 2 => single += 1,
                _ => {}
            }
            for cand in d + 1..=3 {
                let (f, s) = match cand {
                    3 if full > 0 => (full - 1, single),
                    1 | 2 if single > 0 => (full, single - 1),
                    _ => continue,
                };
                if f + s <= j {
                    self.digits[j] = cand;
                    fill_minimal(&mut self.digits[..j], f, s);
                    return true;
                }
            }
        }
        false
    }
}

/// Smallest digit string with `full` threes and `single` singletons.
fn fill_minimal(digits: &mut [u8], full: usize, single: usize) {
    for (i, d) in digits.iter_mut().enumerate() {
        *d = if i < full {
            3
        } else if i < full + single {
            1
        } else {
            0
        };
    }
}

impl Iterator for FamilyIter {
    type Item = Subgraph;

    fn next(&mut self) -> Option<Subgraph> {
        if !self.pending {
            return None;
        }
        let out = self.current();
        self.pending = self.advance();
        Some(out)
    }
}

pub fn enumerate_family(n: usize, sig: Signature) -> Result<FamilyIter> {
    MatchingGraph::new(n)?;
    sig.validate(n)?;
    Ok(FamilyIter::new(n, sig))
}

/// A sorted, de-duplicated list of members over one `M_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    n: usize,
    members: Vec<Subgraph>,
}

impl Family {
    pub fn new(n: usize, mut members: Vec<Subgraph>) -> Result<Family> {
        MatchingGraph::new(n)?;
        if let Some(bad) = members.iter().find(|m| m.n() != n) {
            return Err(Error::MismatchedGraphs(n, bad.n()));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { n, members })
    }

    pub fn empty(n: usize) -> Result<Family> {
        Family::new(n, Vec::new())
    }

    /// All of `H^(p,s)(n)`.
    pub fn complete(n: usize, sig: Signature) -> Result<Family> {
        Ok(Family {
            n,
            members: enumerate_family(n, sig)?.collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subgraph] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subgraph> {
        self.members.iter()
    }

    pub fn contains(&self, f: &Subgraph) -> bool {
        self.members.binary_search(f).is_ok()
    }

    pub fn contains_mask(&self, mask: u32) -> bool {
        self.members.binary_search_by(|m| m.mask.cmp(&mask)).is_ok()
    }

    pub fn is_intersecting(&self) -> bool {
        is_intersecting_family(&self.members).expect("members share n")
    }

    /// Slots common to every member (all slots for the empty family).
    pub fn common_mask(&self) -> u32 {
        self.members.iter().fold(full_mask(self.n), |acc, m| acc & m.mask)
    }

    /// Members all share one signature; `None` when empty or mixed.
    pub fn uniform_signature(&self) -> Option<Signature> {
        let first = self.members.first()?.signature();
        self.members.iter().all(|m| m.signature() == first).then_some(first)
    }

    /// Family file form: one member per line as sorted vertex tokens.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    /// Reads a family file. Blank lines and `#` comments are skipped.
    pub fn parse(n: usize, text: &str) -> Result<Family> {
        let mut members = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let member = Subgraph::parse(n, line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            members.push(member);
        }
        Family::new(n, members)
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Subgraph;
    type IntoIter = std::slice::Iter<'a, Subgraph>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
