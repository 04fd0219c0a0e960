//! Exact search and verification for intersecting families of induced
//! subgraphs of the perfect matching graph `M_n`.
//!
//! * [`matching`]: `M_n`, the families `H^(p,s)(n)`, enumeration and set tests.
//! * [`count`]: exact family, star and order counts, generic over the integer type.
//! * [`cycle`]: cyclic orders of the edges, B/R-intervals and the checkers
//!   built on them.
//! * [`extremal`]: maximum intersecting families and EKR verdicts.
//! * [`construct`]: stars and the vertex-avoiding family.
//! * [`general`]: the same questions on disjoint unions of cliques.

pub mod bitset;
pub mod construct;
pub mod count;
pub mod cycle;
pub mod error;
pub mod extremal;
pub mod general;
pub mod matching;

pub use error::{Error, Result};
pub use matching::{Family, MatchingGraph, Signature, Subgraph, Vertex};

/// Fixed-width exact count, enough for every enumerable instance.
pub type Count = u128;

/// Arbitrary-precision exact count for formula-only evaluation at large `n`.
pub type BigCount = num_bigint::BigUint;
