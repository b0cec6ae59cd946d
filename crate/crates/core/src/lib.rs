//! Flag-transitive 2-designs whose automorphism group preserves a chain of
//! point partitions.
//!
//! The point set is `Z_{e_1} x ... x Z_{e_s}` and the `i`-th partition groups
//! points that agree in every coordinate above `i`. The full stabilizer of
//! that chain is the iterated wreath product `S_{e_1} wr ... wr S_{e_s}`.
//!
//! * [`chain`]: points, classes and array functions.
//! * [`feasibility`]: exact divisibility test for block sizes.
//! * [`design`]: canonical block, block enumeration, `b`, `lambda`, the
//!   explicit family and chain collapses.
//! * [`wreath`]: explicit generators of the chain stabilizer, orbits and
//!   stabilizer transitivity.
//! * [`verify`]: array-sum and pair-count 2-design checks, flag-transitivity
//!   and uniqueness certificates.
//! * [`search`]: exhaustive parameter sweeps and table output.

pub mod chain;
pub mod design;
pub mod error;
pub mod feasibility;
pub mod search;
pub mod verify;
pub mod wreath;

pub use chain::{parse_chain, ArrayFunction, ChainSpec, ClassId, Point};
pub use design::{
    block_count, canonical_block, collapse_chain, design_spec, enumerate_blocks, family_params,
    is_uniform, Block, BlockEnumerator, DesignSpec,
};
pub use error::{DesignError, Result};
pub use feasibility::{
    arithmetic_facts, check_ft, search_k, y_sequence, FeasibilityReport, UniformSequence,
};
pub use search::{search, SearchRow};
pub use verify::{
    brute_force_pair_count, certify_flag_transitive, certify_uniqueness, check_2design_arrays,
    VerificationCertificate,
};
pub use wreath::{orbit, wreath_generators, ChainPermutation, GeneratorSet};
