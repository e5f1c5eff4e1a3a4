//! Crate-wide error type.
//!
//! Verification failures carry the violated invariant by name so that CLI
//! certificates and test output can report exactly what broke.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a sublattice: {0}")]
    NotASublattice(String),

    #[error("enumeration node budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("result is not integral: {0}")]
    NonIntegralResult(String),

    #[error("search exhausted its budget without finding a witness: {0}")]
    NotFound(String),

    #[error("supplied witness fails its defining identities: {0}")]
    InvalidWitness(String),

    #[error("rank {0} exceeds the supported bound {1} for this operation")]
    RankTooLarge(usize, usize),

    #[error("lattice is not even unimodular: {0}")]
    NotEvenUnimodular(String),

    #[error("quadratic space is degenerate: {0}")]
    Degenerate(String),

    #[error("quadratic space has Witt defect one; no isotropic complement pair exists")]
    DefectOne,

    #[error("invariant failed: {0}")]
    InvariantFailure(String),

    #[error("neighbor vector not admissible: {0}")]
    WNotAdmissible(String),

    #[error("ambient block structure missing or malformed: {0}")]
    StructureMismatch(String),

    #[error("no lift exists for the given minimal vector; projection claims are inconsistent")]
    NoLift,

    #[error("moment system is singular: {0}")]
    SingularSystem(String),

    #[error("checkpoint data corrupt: {0}")]
    CheckpointCorrupt(String),

    #[error("catalog self-check failed: {0}")]
    SelfCheckFailed(String),

    #[error("module reduction found no free basis: {0}")]
    NoFreeBasis(String),

    #[error("malformed input file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
