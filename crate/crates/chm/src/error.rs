use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChmError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("expected {n}x{n} entries, got {len}")]
    NotSquare { n: usize, len: usize },
    #[error("entry ({row}, {col}) has modulus {modulus}, not 1")]
    NotUnimodular { row: usize, col: usize, modulus: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("unknown catalogue id `{0}`")]
    UnknownId(String),
    #[error("`{id}` takes {expected} parameters, got {found}")]
    Arity {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not an affine family")]
    NotAffine(String),
    #[error("input is not a Hadamard matrix (Gram deviation {gram_deviation:e})")]
    NotHadamard { gram_deviation: f64 },
    #[error("diagonal {index} must start with phase 0")]
    LeadingPhase { index: usize },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("block {block:?} of chain ({i}, {j}) is not closed (sum {sum:e})")]
    NotClosed {
        i: usize,
        j: usize,
        block: Vec<usize>,
        sum: f64,
    },
    #[error("row indices ({i}, {j}) invalid for size {n}")]
    BadIndex { i: usize, j: usize, n: usize },
    #[error("size {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
}
