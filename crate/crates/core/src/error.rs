use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NhtError {
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),

    #[error("modulus {0} does not fit in 64 bits")]
    ModulusTooLarge(String),

    #[error("{value} is not invertible modulo {modulus}")]
    NonInvertible { value: u64, modulus: u64 },

    #[error("modulus {0} is composite; only prime moduli are supported here")]
    CompositeModulus(u64),

    #[error("shape mismatch: expected {expected} entries, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("residue {value} at index {index} is not below modulus {modulus}")]
    ResidueOutOfRange {
        index: usize,
        value: u64,
        modulus: u64,
    },

    #[error("scaled convention needs length {length} invertible modulo {modulus}")]
    Convention { length: usize, modulus: u64 },

    #[error("cannot factor 0")]
    ZeroFactorization,
}

pub type Result<T, E = NhtError> = std::result::Result<T, E>;
