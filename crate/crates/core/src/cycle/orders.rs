//! Enumerating, sampling and generating canonical cyclic orders.

use std::collections::{HashMap, HashSet, VecDeque};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::CyclicOrder;
use crate::count::{interval_order_count, order_count};
use crate::error::{Error, Result};
use crate::matching::{Signature, Subgraph};
use crate::Count;

/// Largest order space walked exhaustively unless the caller raises it.
pub const DEFAULT_ORDER_CAP: u128 = 10_000_000;

fn check_cap(n: usize, restricted: bool, cap: u128) -> Result<u128> {
    let needed: Count = order_count(n, restricted)?;
    if needed > cap {
        return Err(Error::CapExceeded {
            what: "cyclic order enumeration",
            needed,
            cap,
        });
    }
    Ok(needed)
}

/// Every canonical order (`restricted` pins the last orientation to `(l, r)`),
/// permutations in lexicographic order, orientations counting up in binary
/// from the first position.
pub fn enumerate_orders(n: usize, restricted: bool, cap: u128) -> Result<impl Iterator<Item = CyclicOrder>> {
    CyclicOrder::canonical(n)?;
    check_cap(n, restricted, cap)?;
    let free_bits = if restricted { n - 1 } else { n };
    Ok((0..n - 1).permutations(n - 1).flat_map(move |mut head| {
        head.push(n - 1);
        (0u32..1 << free_bits).map(move |bits| CyclicOrder {
            sigma: head.clone(),
            tau: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        })
    }))
}

/// `count` orders drawn uniformly and independently: the first `n - 1`
/// positions get a uniform permutation, each orientation an independent bit.
pub fn sample_orders(n: usize, restricted: bool, count: usize, seed: u64) -> Result<Vec<CyclicOrder>> {
    CyclicOrder::canonical(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let mut sigma: Vec<usize> = (0..n - 1).collect();
            sigma.shuffle(&mut rng);
            sigma.push(n - 1);
            let mut tau: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            if restricted {
                tau[n - 1] = false;
            }
            CyclicOrder { sigma, tau }
        })
        .collect())
}

/// Size of the set reached from the canonical order by the adjacent
/// transpositions `t_1..t_{n-2}` and the swap at 0-based `swap_position`.
pub fn generator_closure(n: usize, swap_position: usize) -> Result<usize> {
    let start = CyclicOrder::canonical(n)?;
    check_cap(n, true, DEFAULT_ORDER_CAP)?;
    if swap_position + 1 >= n {
        return Err(Error::PositionOutOfRange {
            position: swap_position,
            n,
        });
    }
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(order) = queue.pop_front() {
        let moves = (0..n.saturating_sub(2))
            .map(|i| order.adjacent_transpose(i))
            .chain(std::iter::once(order.swap(swap_position)));
        for next in moves {
            let next = next?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen.len())
}

/// Orders of the full (unrestricted) space in which `f` is a B-interval and
/// in which it is an R-interval, counted by brute force.
pub fn interval_order_counts(f: &Subgraph, sig: Signature, cap: u128) -> Result<(u128, u128)> {
    let n = f.n();
    sig.validate(n)?;
    let mut b = 0;
    let mut r = 0;
    for order in enumerate_orders(n, false, cap)? {
        if (0..n).any(|i| order.b_interval_unchecked(i, sig) == *f) {
            b += 1;
        }
        if (0..n).any(|i| order.r_interval_unchecked(i, sig) == *f) {
            r += 1;
        }
    }
    Ok((b, r))
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCountReport {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub orders: u128,
    pub members: usize,
    /// `2^(n-s) p! s! (n-p-s)!`
    pub formula: u128,
    pub b_min: u128,
    pub b_max: u128,
    pub r_min: u128,
    pub r_max: u128,
    /// Sum of the per-member B counts; `members * formula` and `orders * n`
    /// both have to equal it.
    pub b_incidences: u128,
    pub pass: bool,
}

/// Walks every order once and tallies, for every member, the orders in which
/// it appears as a B-interval and as an R-interval.
pub fn double_count(n: usize, sig: Signature, cap: u128) -> Result<DoubleCountReport> {
    sig.validate(n)?;
    let orders = check_cap(n, false, cap)?;
    let formula: Count = interval_order_count(n, sig)?;
    let all: Vec<CyclicOrder> = enumerate_orders(n, false, cap)?.collect();
    let tally = |mut acc: (HashMap<u32, u128>, HashMap<u32, u128>), order: &CyclicOrder| {
        let mut bs: Vec<u32> = (0..n).map(|i| order.b_interval_unchecked(i, sig).mask()).collect();
        let mut rs: Vec<u32> = (0..n).map(|i| order.r_interval_unchecked(i, sig).mask()).collect();
        bs.sort_unstable();
        bs.dedup();
        rs.sort_unstable();
        rs.dedup();
        for m in bs {
            *acc.0.entry(m).or_default() += 1;
        }
        for m in rs {
            *acc.1.entry(m).or_default() += 1;
        }
        acc
    };
    let merge = |mut a: (HashMap<u32, u128>, HashMap<u32, u128>), b: (HashMap<u32, u128>, HashMap<u32, u128>)| {
        for (k, v) in b.0 {
            *a.0.entry(k).or_default() += v;
        }
        for (k, v) in b.1 {
            *a.1.entry(k).or_default() += v;
        }
        a
    };
    let (b_counts, r_counts) = all
        .par_iter()
        .fold(|| (HashMap::new(), HashMap::new()), tally)
        .reduce(|| (HashMap::new(), HashMap::new()), merge);
    let incidences: u128 = b_counts.values().sum();

    let members: usize = crate::count::family_size::<Count>(n, sig)? as usize;
    let spread = |counts: &HashMap<u32, u128>| {
        // members that never occur count as zero
        let min = if counts.len() < members {
            0
        } else {
            counts.values().copied().min().unwrap_or(0)
        };
        (min, counts.values().copied().max().unwrap_or(0))
    };
    let (b_min, b_max) = spread(&b_counts);
    let (r_min, r_max) = spread(&r_counts);
    Ok(DoubleCountReport {
        n,
        p: sig.p,
        s: sig.s,
        orders,
        members,
        formula,
        b_min,
        b_max,
        r_min,
        r_max,
        b_incidences: incidences,
        pass: b_min == formula
            && b_max == formula
            && r_min == formula
            && r_max == formula
            && incidences == orders * n as u128,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_space_sizes() {
        assert_eq!(enumerate_orders(3, false, DEFAULT_ORDER_CAP).unwrap().count(), 16);
        assert_eq!(enumerate_orders(3, true, DEFAULT_ORDER_CAP).unwrap().count(), 8);
        assert_eq!(enumerate_orders(4, false, DEFAULT_ORDER_CAP).unwrap().count(), 96);
        assert_eq!(enumerate_orders(1, false, DEFAULT_ORDER_CAP).unwrap().count(), 2);
        let all: Vec<_> = enumerate_orders(5, true, DEFAULT_ORDER_CAP).unwrap().collect();
        assert_eq!(all.len(), 384);
        assert!(all.iter().all(|o| o.is_restricted()));
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 384);
    }

    #[test]
    fn cap_refusal() {
        assert!(matches!(
            enumerate_orders(9, false, DEFAULT_ORDER_CAP),
            Err(Error::CapExceeded { .. })
        ));
        assert!(enumerate_orders(5, false, 10).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let a = sample_orders(9, true, 50, 7).unwrap();
        let b = sample_orders(9, true, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|o| o.is_restricted()));
        assert_ne!(a, sample_orders(9, true, 50, 8).unwrap());
    }

    #[test]
    fn single_member_counts() {
        let sig = Signature::new(1, 1);
        let f = Subgraph::parse(3, "l1 r1 l2").unwrap();
        assert_eq!(interval_order_counts(&f, sig, DEFAULT_ORDER_CAP).unwrap(), (4, 4));
        let g = Subgraph::parse(4, "r3 l4 r4").unwrap();
        assert_eq!(interval_order_counts(&g, sig, DEFAULT_ORDER_CAP).unwrap(), (16, 16));
    }

    #[test]
    fn double_count_small() {
        let rep = double_count(3, Signature::new(1, 1), DEFAULT_ORDER_CAP).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.formula, 4);
        assert_eq!(rep.b_incidences, rep.orders * 3);
        assert_eq!(rep.members as u128 * rep.formula, rep.orders * 3);
    }

    #[test]
    fn closure_reaches_everything() {
        assert_eq!(generator_closure(4, 1).unwrap(), 48);
        assert_eq!(generator_closure(5, 1).unwrap(), 384);
        assert!(generator_closure(4, 3).is_err());
    }
}
