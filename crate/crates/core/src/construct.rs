//! Named families: stars, and the family avoiding one vertex.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::matching::{enumerate_family, Family, Signature, Subgraph, Vertex};

/// Every member of `H^(p,s)(n)` containing `x`.
pub fn star_family(n: usize, sig: Signature, x: Vertex) -> Result<Family> {
    let x = x.check(n)?;
    let members = enumerate_family(n, sig)?.filter(|f| f.contains(x)).collect();
    Family::new(n, members)
}

/// Every member of `H^(p,s)(n)` missing `x`. At `n = 2p + s` this is an
/// intersecting family of star size with no common vertex.
pub fn avoid_vertex_family(n: usize, sig: Signature, x: Vertex) -> Result<Family> {
    let x = x.check(n)?;
    let members = enumerate_family(n, sig)?.filter(|f| !f.contains(x)).collect();
    Family::new(n, members)
}

/// A maximal intersecting family: members in seeded random order, each kept
/// if it meets everything kept so far.
pub fn random_maximal_intersecting(n: usize, sig: Signature, seed: u64) -> Result<Family> {
    let mut all: Vec<Subgraph> = enumerate_family(n, sig)?.collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut kept: Vec<Subgraph> = Vec::new();
    for f in all {
        if kept.iter().all(|g| g.mask() & f.mask() != 0) {
            kept.push(f);
        }
    }
    Family::new(n, kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::{family_size, star_size};
    use crate::extremal::{is_star, StarStatus};
    use proptest::prelude::*;

    fn v(text: &str) -> Vertex {
        text.parse().unwrap()
    }

    #[test]
    fn examples() {
        let s11 = Signature::new(1, 1);
        let star = star_family(3, s11, v("l1")).unwrap();
        assert_eq!(star.len(), 6);
        assert!(star.iter().all(|f| f.contains(v("l1"))));
        assert_eq!(star_family(6, Signature::new(1, 2), v("r4")).unwrap().len(), 80);

        let g = avoid_vertex_family(3, s11, v("l3")).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.is_intersecting());
        assert_eq!(g.common_mask(), 0);
        assert_eq!(is_star(&g).unwrap(), StarStatus::None);

        let g = avoid_vertex_family(4, Signature::new(1, 2), v("l4")).unwrap();
        assert_eq!(g.len(), 24);
        assert!(g.is_intersecting());

        let g = avoid_vertex_family(5, s11, v("l5")).unwrap();
        assert_eq!(g.len(), 28);
        assert!(!g.is_intersecting());
    }

    #[test]
    fn random_families_are_maximal() {
        let sig = Signature::new(1, 2);
        let a = random_maximal_intersecting(6, sig, 11).unwrap();
        assert_eq!(a, random_maximal_intersecting(6, sig, 11).unwrap());
        assert!(a.is_intersecting());
        for f in enumerate_family(6, sig).unwrap() {
            if !a.contains(&f) {
                assert!(a.iter().any(|g| g.mask() & f.mask() == 0), "{f} could be added");
            }
        }
    }

    #[test]
    fn bad_vertex() {
        assert!(star_family(3, Signature::new(1, 1), v("l4")).is_err());
        assert!(avoid_vertex_family(3, Signature::new(1, 1), v("r9")).is_err());
        assert!(star_family(3, Signature::new(2, 2), v("l1")).is_err());
    }

    fn instance() -> impl Strategy<Value = (usize, Signature, usize)> {
        (1usize..=6)
            .prop_flat_map(|n| (Just(n), 0..=n))
            .prop_flat_map(|(n, p)| (Just(n), Just(p), 0..=n - p))
            .prop_filter("nonempty", |(_, p, s)| 2 * p + s >= 1)
            .prop_flat_map(|(n, p, s)| (Just(n), Just(Signature::new(p, s)), 0..2 * n))
    }

    proptest! {
        #[test]
        fn star_and_avoid_partition((n, sig, slot) in instance()) {
            let x = Vertex::from_slot(slot);
            let star = star_family(n, sig, x).unwrap();
            let avoid = avoid_vertex_family(n, sig, x).unwrap();
            prop_assert_eq!(star.len() as u128, star_size::<u128>(n, sig).unwrap());
            prop_assert_eq!((star.len() + avoid.len()) as u128, family_size::<u128>(n, sig).unwrap());
            prop_assert!(star.iter().all(|f| !avoid.contains(f)));
        }

        #[test]
        fn complement_pairing_at_threshold(p in 0usize..=2, s in 1usize..=2, slot in 0usize..12) {
            let sig = Signature::new(p, s);
            let n = 2 * p + s;
            let x = Vertex::from_slot(slot % (2 * n));
            let avoid = avoid_vertex_family(n, sig, x).unwrap();
            prop_assert!(avoid.is_intersecting());
            prop_assert_eq!(avoid.len() as u128, star_size::<u128>(n, sig).unwrap());
            for f in enumerate_family(n, sig).unwrap() {
                let c: Subgraph = f.complement();
                prop_assert!(avoid.contains(&f) != avoid.contains(&c));
            }
        }
    }
}
