use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse rational scalar from {input:?} (expected \"p/q\" or \"p\")")]
    ScalarParse { input: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch at site {site}: local operator is {found}x{found}, site dimension is {expected}")]
    DimensionMismatch {
        site: usize,
        expected: usize,
        found: usize,
    },

    #[error("permutation length {perm_len} does not match the number of tensor factors {sites}")]
    PermutationLengthMismatch { sites: usize, perm_len: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("eta = 0 is rejected (the construction degenerates)")]
    ZeroEta,

    #[error("non-generic inhomogeneities: {factor}")]
    NonGeneric { factor: String },

    #[error("pole: {0}")]
    Pole(String),

    #[error("invalid chain spec: {0}")]
    Spec(String),

    #[error("singular matrix: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
