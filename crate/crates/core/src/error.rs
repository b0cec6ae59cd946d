use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by chain, design and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("level {level} out of range for a chain of length {s}")]
    LevelOutOfRange { level: usize, s: usize },

    #[error("point out of range: {0}")]
    PointOutOfRange(String),

    #[error("block size k={k} out of range, need 2 <= k < v={v}")]
    BlockSizeOutOfRange { k: u64, v: u64 },

    #[error("y_{index} = {numerator}/{denominator} is not an integer")]
    NonIntegral {
        index: usize,
        numerator: u128,
        denominator: u128,
    },

    #[error("invalid uniform sequence: {0}")]
    InvalidUniformSequence(String),

    #[error("parameters e={e} k={k} are infeasible: {reason}")]
    Infeasible { e: String, k: u64, reason: String },

    #[error("permutation does not preserve the chain at level {level}")]
    NotChainPreserving { level: usize },

    #[error("subset is not uniform at level {level}: classes {first} and {second} hold {first_count} and {second_count} points")]
    NotUniform {
        level: usize,
        first: String,
        second: String,
        first_count: u64,
        second_count: u64,
    },

    #[error("empty subset")]
    EmptyBlock,

    #[error("{what} count {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: BigUint,
        cap: u64,
    },

    #[error("orbit exceeded cap {cap} after reaching {partial} elements")]
    OrbitCapExceeded { cap: usize, partial: usize },

    #[error("chain with v={v} points is too large to materialize")]
    ChainTooLarge { v: u64 },

    #[error("chain of length {s} cannot be collapsed")]
    CannotCollapse { s: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, DesignError>;
