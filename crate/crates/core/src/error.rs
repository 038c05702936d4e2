use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank {0}: permutations need n >= 1")]
    InvalidRank(usize),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("invalid transposition ({a},{b}) in S_{n}")]
    InvalidTransposition { a: usize, b: usize, n: usize },

    #[error("{u} is not below {w} in Bruhat order")]
    NotComparable { u: String, w: String },

    #[error("pattern of rank {pattern} does not fit in a permutation of rank {word}")]
    PatternTooLong { pattern: usize, word: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("multiset cardinality mismatch: {0} vs {1}")]
    CardinalityMismatch(usize, usize),

    #[error("invalid segment ({a},{b}) over {nvars} variables")]
    InvalidSegment { a: usize, b: usize, nvars: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
