//! Exact computation with finite matrix groups over prime fields.
//!
//! The crate builds affine matrix groups over `F_p` (semidirect products of a
//! translation module with a matrix group), enumerates their π-subgroups and
//! π-maximal subgroups up to conjugacy, and decides π-submaximality for a
//! family of groups with a unique minimal normal subgroup by a finite search
//! through the interval between the group and its automorphism-group model.
//! Every verification emits a machine-readable [`cert::Certificate`].

pub mod cert;
pub mod checks;
pub mod ff;
pub mod group;
pub mod pi;
pub mod rep;
pub mod samples;
pub mod submax;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime {0} is not admissible (x^2+x+2 has no two distinct roots mod {0})")]
    InadmissiblePrime(u64),
    #[error("matrix is singular mod {p}")]
    SingularMatrix { p: u64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("closure exceeded the materialization bound of {bound} elements")]
    ClosureOverflow { bound: usize },
    #[error("operation requires a dense (materialized) group")]
    NonDenseGroup,
    #[error("operation requires a split group")]
    NonSplitGroup,
    #[error("subgroup is not normal in the claimed parent")]
    NotNormal,
    #[error(
        "cannot certify solvability of {pi_part}-order π-subgroups: more than two relevant primes"
    )]
    SolvabilityUnverified { pi_part: u64 },
    #[error("π-set does not satisfy the hypothesis of this operation: {0}")]
    PiHypothesis(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
