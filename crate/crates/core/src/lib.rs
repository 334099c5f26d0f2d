//! Subgroups of infinitely iterated wreath products in product action with a
//! prescribed Hausdorff dimension.
//!
//! The library has two engines that check each other:
//!
//! * an *explicit* engine ([`construction::explicit_layers`]) that builds the
//!   groups `K_n` / `H_n` as honest permutation groups on small product
//!   domains, computes their orbits by breadth-first search and verifies the
//!   structural properties directly;
//! * a *parameter* engine ([`construction::layer_recursion`]) that runs the
//!   orbit-count recursion `(c_n, o_n)` at any scale, switching from exact
//!   big-integer arithmetic to log-domain arithmetic once values outgrow a
//!   configurable bit threshold.
//!
//! On top of the recursion, [`dimension`] evaluates the dimension quotients
//! `D_n`, their residuals and the full set of convergence diagnostics, and
//! [`sequences`] specifies the underlying sequence of transitive permutation
//! groups together with the "good sequence" check.

pub mod arithmetic;
pub mod construction;
pub mod dimension;
pub mod permgroup;
pub mod sequences;

use thiserror::Error;

/// Errors shared by all modules.
///
/// The CLI maps these onto its exit codes: configuration and validation
/// problems exit 2, capacity limits exit 3, infeasible orbit selection exits 4
/// and internal inconsistencies exit 5.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input failed validation (parse errors, non-transitive groups, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A configured capacity cap (points, group order, enumeration size) was hit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An internal invariant failed; this signals a bug, not bad input.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    /// No union of exactly the requested number of orbits is invariant.
    /// Carries the sizes of the blocks of the induced action as certificate.
    #[error("no invariant union of exactly {wanted} orbits exists; block sizes {block_sizes:?}")]
    SelectionInfeasible {
        wanted: usize,
        block_sizes: Vec<usize>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Validation(_) | Error::Io(_) => 2,
            Error::Capacity(_) => 3,
            Error::SelectionInfeasible { .. } => 4,
            Error::Inconsistency(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
