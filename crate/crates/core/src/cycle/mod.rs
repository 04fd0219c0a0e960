//! Cyclic orders of the edges of `M_n` and the intervals they carry.
//!
//! An order places edge `sigma[i]` at position `i` and presents it as
//! `(l, r)` when `tau[i]` is false, `(r, l)` when true. Canonical orders keep
//! the last edge in the last position. A B-interval at position `i` takes
//! both endpoints of the edges at positions `i..i+p` and the first-presented
//! endpoint of the next `s`; an R-interval takes the second-presented
//! endpoint of the edges at `i..i+s` and both endpoints of the next `p`.
//! Positions wrap modulo `n`.

mod lemmas;
mod orders;

pub use lemmas::*;
pub use orders::*;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{Family, Side, Signature, Subgraph, Vertex, MAX_EDGES};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicOrder {
    sigma: Vec<usize>,
    tau: Vec<bool>,
}

impl CyclicOrder {
    /// Canonical order from 0-based edge indices.
    pub fn new(sigma: Vec<usize>, tau: Vec<bool>) -> Result<CyclicOrder> {
        let order = CyclicOrder::from_arrangement(sigma, tau)?;
        if !order.is_canonical() {
            return Err(Error::InvalidOrder(format!(
                "last position must hold edge {}",
                order.n()
            )));
        }
        Ok(order)
    }

    /// Any rotation of an order; only bijectivity is required.
    pub fn from_arrangement(sigma: Vec<usize>, tau: Vec<bool>) -> Result<CyclicOrder> {
        let n = sigma.len();
        if n == 0 || n > MAX_EDGES {
            return Err(Error::UnsupportedSize(n, MAX_EDGES));
        }
        if tau.len() != n {
            return Err(Error::InvalidOrder(format!(
                "tau has length {}, expected {n}",
                tau.len()
            )));
        }
        let mut seen = vec![false; n];
        for &e in &sigma {
            if e >= n || std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidOrder(format!("{sigma:?} is not a permutation")));
            }
        }
        Ok(CyclicOrder { sigma, tau })
    }

    /// Canonical order from the report form: 1-based `sigma`, `tau` as a bit string.
    pub fn from_one_based(sigma: &[usize], tau: &str) -> Result<CyclicOrder> {
        let sigma = sigma
            .iter()
            .map(|&e| {
                e.checked_sub(1)
                    .ok_or_else(|| Error::InvalidOrder("edge indices start at 1".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let tau = tau
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidOrder(format!("bad tau digit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        CyclicOrder::new(sigma, tau)
    }

    /// Identity permutation, all orientations `(l, r)`.
    pub fn canonical(n: usize) -> Result<CyclicOrder> {
        CyclicOrder::new((0..n).collect(), vec![false; n])
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn tau(&self) -> &[bool] {
        &self.tau
    }

    pub fn is_canonical(&self) -> bool {
        self.sigma[self.n() - 1] == self.n() - 1
    }

    /// Canonical with the last edge presented as `(l, r)`.
    pub fn is_restricted(&self) -> bool {
        self.is_canonical() && !self.tau[self.n() - 1]
    }

    /// The same cyclic arrangement read from position `shift`.
    pub fn rotated(&self, shift: usize) -> CyclicOrder {
        let n = self.n();
        let idx = |i: usize| (i + shift) % n;
        CyclicOrder {
            sigma: (0..n).map(|i| self.sigma[idx(i)]).collect(),
            tau: (0..n).map(|i| self.tau[idx(i)]).collect(),
        }
    }

    /// Rotation that puts the last edge in the last position.
    pub fn canonicalized(&self) -> CyclicOrder {
        let n = self.n();
        let at = self.sigma.iter().position(|&e| e == n - 1).expect("permutation");
        self.rotated((at + 1) % n)
    }

    pub fn first_vertex(&self, pos: usize) -> Vertex {
        let side = if self.tau[pos] { Side::Right } else { Side::Left };
        Vertex::new(self.sigma[pos], side)
    }

    pub fn second_vertex(&self, pos: usize) -> Vertex {
        self.first_vertex(pos).partner()
    }

    fn check_interval(&self, pos: usize, sig: Signature) -> Result<()> {
        sig.validate(self.n())?;
        if pos >= self.n() {
            return Err(Error::PositionOutOfRange {
                position: pos,
                n: self.n(),
            });
        }
        Ok(())
    }

    fn edge_bits(&self, pos: usize) -> u32 {
        0b11 << (2 * self.sigma[pos])
    }

    /// B-interval starting at 0-based position `pos`.
    pub fn b_interval(&self, pos: usize, sig: Signature) -> Result<Subgraph> {
        self.check_interval(pos, sig)?;
        Ok(self.b_interval_unchecked(pos, sig))
    }

    /// R-interval starting at 0-based position `pos`.
    pub fn r_interval(&self, pos: usize, sig: Signature) -> Result<Subgraph> {
        self.check_interval(pos, sig)?;
        Ok(self.r_interval_unchecked(pos, sig))
    }

    pub(crate) fn b_interval_unchecked(&self, pos: usize, sig: Signature) -> Subgraph {
        let n = self.n();
        let mut mask = 0;
        for j in 0..sig.p {
            mask |= self.edge_bits((pos + j) % n);
        }
        for j in sig.p..sig.span() {
            mask |= self.first_vertex((pos + j) % n).bit();
        }
        Subgraph::from_mask_unchecked(n, mask)
    }

    pub(crate) fn r_interval_unchecked(&self, pos: usize, sig: Signature) -> Subgraph {
        let n = self.n();
        let mut mask = 0;
        for j in 0..sig.s {
            mask |= self.second_vertex((pos + j) % n).bit();
        }
        for j in sig.s..sig.span() {
            mask |= self.edge_bits((pos + j) % n);
        }
        Subgraph::from_mask_unchecked(n, mask)
    }

    pub fn b_intervals(&self, sig: Signature) -> Result<Vec<Subgraph>> {
        sig.validate(self.n())?;
        Ok((0..self.n()).map(|i| self.b_interval_unchecked(i, sig)).collect())
    }

    pub fn r_intervals(&self, sig: Signature) -> Result<Vec<Subgraph>> {
        sig.validate(self.n())?;
        Ok((0..self.n()).map(|i| self.r_interval_unchecked(i, sig)).collect())
    }

    /// Exchanges the edges at 0-based positions `i < j`, orientations travelling
    /// with their edges. The last position is fixed by the canonical form.
    pub fn transpose(&self, i: usize, j: usize) -> Result<CyclicOrder> {
        let n = self.n();
        let (i, j) = (i.min(j), i.max(j));
        if j >= n {
            return Err(Error::PositionOutOfRange { position: j, n });
        }
        if i == j {
            return Err(Error::TrivialTransposition);
        }
        if j == n - 1 {
            return Err(Error::LastPositionTransposition);
        }
        let mut out = self.clone();
        out.sigma.swap(i, j);
        out.tau.swap(i, j);
        Ok(out)
    }

    /// `t_i`: exchanges positions `i` and `i + 1` (0-based, `i + 1 < n - 1`).
    pub fn adjacent_transpose(&self, i: usize) -> Result<CyclicOrder> {
        self.transpose(i, i + 1)
    }

    /// Flips the presentation of the edge at 0-based position `i`.
    pub fn swap(&self, i: usize) -> Result<CyclicOrder> {
        if i >= self.n() {
            return Err(Error::PositionOutOfRange {
                position: i,
                n: self.n(),
            });
        }
        let mut out = self.clone();
        out.tau[i] = !out.tau[i];
        Ok(out)
    }

    /// Reverses the first `n - 1` positions and flips every orientation.
    pub fn reflect(&self) -> CyclicOrder {
        let n = self.n();
        let mut sigma: Vec<usize> = self.sigma[..n - 1].iter().rev().copied().collect();
        sigma.push(self.sigma[n - 1]);
        let mut tau: Vec<bool> = self.tau[..n - 1].iter().rev().map(|t| !t).collect();
        tau.push(!self.tau[n - 1]);
        CyclicOrder { sigma, tau }
    }

    pub fn sigma_one_based(&self) -> Vec<usize> {
        self.sigma.iter().map(|e| e + 1).collect()
    }

    pub fn tau_bits(&self) -> String {
        self.tau.iter().map(|&t| if t { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for CyclicOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sigma: Vec<String> = self.sigma_one_based().iter().map(|e| e.to_string()).collect();
        write!(f, "sigma=({}) tau={}", sigma.join(","), self.tau_bits())
    }
}

impl fmt::Debug for CyclicOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Report form `{"sigma":[5,3,2,1,4,6],"tau":"011010"}`.
impl Serialize for CyclicOrder {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("CyclicOrder", 2)?;
        st.serialize_field("sigma", &self.sigma_one_based())?;
        st.serialize_field("tau", &self.tau_bits())?;
        st.end()
    }
}

/// The members of a family realized as intervals of one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalFamily {
    /// 0-based starting positions of realized B-intervals, ascending.
    pub b_positions: Vec<usize>,
    /// 0-based starting positions of realized R-intervals, ascending.
    pub r_positions: Vec<usize>,
    /// Minimum overlap of two realized B-intervals; `p + s` for a single one.
    pub k: Option<usize>,
    /// Distinct realized members, sorted.
    pub members: Vec<Subgraph>,
}

impl IntervalFamily {
    pub fn realized(&self) -> usize {
        self.members.len()
    }

    /// Slots shared by every realized member; 0 when nothing is realized.
    pub fn common_mask(&self) -> u32 {
        if self.members.is_empty() {
            return 0;
        }
        self.members.iter().fold(u32::MAX, |acc, m| acc & m.mask())
    }
}

/// The k-statistic of a set of B-intervals: the fewest edges on which two of
/// them meet (two B-intervals meet on an edge exactly when both contain its
/// first-presented endpoint).
pub fn k_statistic(b_intervals: &[Subgraph], sig: Signature) -> Option<usize> {
    match b_intervals.len() {
        0 => None,
        1 => Some(sig.span()),
        _ => b_intervals
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                b_intervals[i + 1..]
                    .iter()
                    .map(move |b| (a.support() & b.support()).count_ones() as usize)
            })
            .min(),
    }
}

/// Splits `family`'s members into those realized as B- and R-intervals of `order`.
pub fn realize(order: &CyclicOrder, family: &Family, sig: Signature) -> Result<IntervalFamily> {
    sig.validate(order.n())?;
    if family.n() != order.n() {
        return Err(Error::MismatchedGraphs(family.n(), order.n()));
    }
    Ok(realize_unchecked(order, family, sig))
}

pub(crate) fn realize_unchecked(order: &CyclicOrder, family: &Family, sig: Signature) -> IntervalFamily {
    let n = order.n();
    let mut b_positions = Vec::new();
    let mut r_positions = Vec::new();
    let mut b_members = Vec::new();
    let mut members = Vec::with_capacity(2 * n);
    for pos in 0..n {
        let b = order.b_interval_unchecked(pos, sig);
        if family.contains(&b) {
            b_positions.push(pos);
            b_members.push(b);
            members.push(b);
        }
        let r = order.r_interval_unchecked(pos, sig);
        if family.contains(&r) {
            r_positions.push(pos);
            members.push(r);
        }
    }
    members.sort_unstable();
    members.dedup();
    b_members.sort_unstable();
    b_members.dedup();
    IntervalFamily {
        b_positions,
        r_positions,
        k: k_statistic(&b_members, sig),
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::enumerate_family;

    fn sample_order() -> CyclicOrder {
        CyclicOrder::from_one_based(&[5, 3, 2, 1, 4, 6], "011010").unwrap()
    }

    fn sub(n: usize, text: &str) -> Subgraph {
        Subgraph::parse(n, text).unwrap()
    }

    #[test]
    fn canonical_orders() {
        let c = CyclicOrder::canonical(4).unwrap();
        assert_eq!(c.sigma_one_based(), vec![1, 2, 3, 4]);
        assert_eq!(c.tau_bits(), "0000");
        assert!(c.is_restricted());
        let one = CyclicOrder::canonical(1).unwrap();
        assert_eq!(one.sigma_one_based(), vec![1]);
        assert!(one.is_restricted());
    }

    #[test]
    fn worked_example_intervals() {
        let c = sample_order();
        let sig = Signature::new(1, 2);
        assert_eq!(c.b_interval(2, sig).unwrap(), sub(6, "r2 l2 l1 r4"));
        assert_eq!(c.b_interval(4, sig).unwrap(), sub(6, "r4 l4 l6 l5"));
        assert_eq!(c.r_interval(1, sig).unwrap(), sub(6, "l3 l2 l1 r1"));
        assert_eq!(c.r_interval(5, sig).unwrap(), sub(6, "r6 r5 r3 l3"));
    }

    #[test]
    fn canonical_intervals_take_left_or_right_singletons() {
        let c = CyclicOrder::canonical(4).unwrap();
        let sig = Signature::new(1, 1);
        assert_eq!(c.b_interval(0, sig).unwrap(), sub(4, "l1 r1 l2"));
        assert_eq!(c.r_interval(0, sig).unwrap(), sub(4, "r1 l2 r2"));
        assert!(c.b_interval(4, sig).is_err());
        assert!(c.r_interval(0, Signature::new(3, 2)).is_err());
    }

    #[test]
    fn intervals_have_the_requested_signature() {
        for order in enumerate_orders(5, false, DEFAULT_ORDER_CAP).unwrap() {
            for (p, s) in [(1, 1), (2, 1), (1, 2), (0, 3), (2, 0), (1, 4)] {
                let sig = Signature::new(p, s);
                for b in order.b_intervals(sig).unwrap() {
                    assert_eq!(b.signature(), sig);
                }
                for r in order.r_intervals(sig).unwrap() {
                    assert_eq!(r.signature(), sig);
                }
            }
        }
    }

    #[test]
    fn construction_rejects_bad_orders() {
        assert!(CyclicOrder::new(vec![1, 0, 2], vec![false; 3]).is_ok());
        assert!(CyclicOrder::new(vec![2, 0, 1], vec![false; 3]).is_err());
        assert!(CyclicOrder::from_arrangement(vec![2, 0, 1], vec![false; 3]).is_ok());
        assert!(CyclicOrder::new(vec![0, 0, 2], vec![false; 3]).is_err());
        assert!(CyclicOrder::new(vec![0, 1, 2], vec![false; 2]).is_err());
        assert!(CyclicOrder::from_one_based(&[1, 2], "0x").is_err());
        assert!(CyclicOrder::from_one_based(&[0, 2], "00").is_err());
    }

    #[test]
    fn transposition_rules() {
        let c = CyclicOrder::canonical(4).unwrap();
        let t = c.transpose(0, 1).unwrap();
        assert_eq!(t.sigma_one_based(), vec![2, 1, 3, 4]);
        assert_eq!(t.tau_bits(), "0000");
        assert_eq!(t.transpose(0, 1).unwrap(), c);
        assert_eq!(c.adjacent_transpose(1).unwrap(), c.transpose(1, 2).unwrap());
        assert_eq!(c.transpose(1, 1), Err(Error::TrivialTransposition));
        assert_eq!(c.transpose(1, 3), Err(Error::LastPositionTransposition));
        assert!(c.adjacent_transpose(2).is_err());
        let mixed = CyclicOrder::from_one_based(&[3, 1, 2, 4], "1000").unwrap();
        let moved = mixed.transpose(0, 2).unwrap();
        assert_eq!(moved.sigma_one_based(), vec![2, 1, 3, 4]);
        assert_eq!(moved.tau_bits(), "0010");
    }

    #[test]
    fn swap_rules() {
        let c = CyclicOrder::canonical(4).unwrap();
        let s = c.swap(1).unwrap();
        assert_eq!(s.tau_bits(), "0100");
        assert_eq!(s.swap(1).unwrap(), c);
        assert!(!c.swap(3).unwrap().is_restricted());
        assert!(c.swap(3).unwrap().swap(3).unwrap().is_restricted());
        assert!(c.swap(4).is_err());
    }

    #[test]
    fn reflection_rules() {
        let c = CyclicOrder::canonical(4).unwrap();
        let r = c.reflect();
        assert_eq!(r.sigma_one_based(), vec![3, 2, 1, 4]);
        assert_eq!(r.tau_bits(), "1111");
        assert_eq!(r.reflect(), c);
        let p = sample_order();
        assert_eq!(p.reflect().reflect(), p);
    }

    #[test]
    fn reflection_exchanges_interval_kinds() {
        for n in 1..=5 {
            for order in enumerate_orders(n, false, DEFAULT_ORDER_CAP).unwrap() {
                let refl = order.reflect();
                for p in 0..=n {
                    for s in 0..=(n - p) {
                        let sig = Signature::new(p, s);
                        if sig.validate(n).is_err() {
                            continue;
                        }
                        let mut b = order.b_intervals(sig).unwrap();
                        let mut r_bar = refl.r_intervals(sig).unwrap();
                        b.sort_unstable();
                        r_bar.sort_unstable();
                        assert_eq!(b, r_bar, "{order} sig={sig}");
                        let mut r = order.r_intervals(sig).unwrap();
                        let mut b_bar = refl.b_intervals(sig).unwrap();
                        r.sort_unstable();
                        b_bar.sort_unstable();
                        assert_eq!(r, b_bar);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_does_not_change_the_realized_family() {
        let sig = Signature::new(1, 2);
        let fam = Family::new(
            6,
            enumerate_family(6, sig)
                .unwrap()
                .filter(|m| m.contains(Vertex::right(3)))
                .collect(),
        )
        .unwrap();
        let base = sample_order();
        let reference = realize(&base, &fam, sig).unwrap();
        for shift in 1..6 {
            let rot = base.rotated(shift);
            assert!(!rot.is_canonical());
            assert_eq!(rot.canonicalized(), base);
            let got = realize(&rot, &fam, sig).unwrap();
            assert_eq!(got.members, reference.members);
            assert_eq!(got.k, reference.k);
        }
    }

    #[test]
    fn realize_examples() {
        let sig = Signature::new(1, 1);
        let n = 4;
        let c = CyclicOrder::canonical(n).unwrap();
        let star = Family::new(
            n,
            enumerate_family(n, sig)
                .unwrap()
                .filter(|m| m.contains(Vertex::left(n - 1)))
                .collect(),
        )
        .unwrap();
        let got = realize(&c, &star, sig).unwrap();
        // 1-based {3, 4} and {3}
        assert_eq!(got.b_positions, vec![2, 3]);
        assert_eq!(got.r_positions, vec![2]);
        assert_eq!(got.realized(), 3);

        let empty = realize(&c, &Family::empty(n).unwrap(), sig).unwrap();
        assert!(empty.b_positions.is_empty() && empty.r_positions.is_empty());
        assert_eq!(empty.k, None);

        let all = realize(&c, &Family::complete(n, sig).unwrap(), sig).unwrap();
        assert_eq!(all.b_positions, vec![0, 1, 2, 3]);
        assert_eq!(all.r_positions, vec![0, 1, 2, 3]);
    }

    #[test]
    fn k_statistic_cases() {
        let sig = Signature::new(1, 2);
        let c = CyclicOrder::canonical(7).unwrap();
        let b = |i| c.b_interval(i, sig).unwrap();
        assert_eq!(k_statistic(&[], sig), None);
        assert_eq!(k_statistic(&[b(0)], sig), Some(3));
        assert_eq!(k_statistic(&[b(0), b(2)], sig), Some(1));
        assert_eq!(k_statistic(&[b(0), b(1), b(2)], sig), Some(1));
        assert_eq!(k_statistic(&[b(1), b(2)], sig), Some(2));
    }

    #[test]
    fn order_serialization() {
        let json = serde_json::to_string(&sample_order()).unwrap();
        assert_eq!(json, r#"{"sigma":[5,3,2,1,4,6],"tau":"011010"}"#);
    }
}
