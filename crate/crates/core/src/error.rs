use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid signature (p={p}, s={s}) for n={n}: {reason}")]
    InvalidSignature {
        n: usize,
        p: usize,
        s: usize,
        reason: &'static str,
    },
    #[error("edge count {0} outside the supported range 1..={1}")]
    UnsupportedSize(usize, usize),
    #[error("subgraphs live over different matching graphs (n={0} vs n={1})")]
    MismatchedGraphs(usize, usize),
    #[error("invalid vertex: {0}")]
    InvalidVertex(String),
    #[error("invalid subgraph: {0}")]
    InvalidSubgraph(String),
    #[error("invalid cyclic order: {0}")]
    InvalidOrder(String),
    #[error("position {position} out of range for n={n}")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("transposition of a position with itself is the identity")]
    TrivialTransposition,
    #[error("transposition touching the last position leaves the canonical form")]
    LastPositionTransposition,
    #[error("{what} needs {needed} items, above the cap of {cap}; sample instead")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    #[error("arithmetic overflow in exact count")]
    Overflow,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
