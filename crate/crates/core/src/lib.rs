//! Finiteness of semigroups and groups generated by Mealy automata.
//!
//! The crate covers the machine model and its transformations (dual,
//! inverse, power automata, sums), Nerode minimization and md-reduction,
//! helix graphs, an exact word-problem solver with BFS enumeration of the
//! generated (semi)group, a set of (in)finiteness criteria combined by
//! [`criteria::decide`], and exhaustive censuses of small machines up to
//! isomorphism.

pub mod census;
pub mod criteria;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod helix;
pub mod machine;
pub mod minimize;
pub mod semigroup;
pub mod transform;

pub use error::{Error, Result};
pub use machine::{canonical_form, classify, is_isomorphic, CanonicalKey, ClassificationFlags, MealyMachine};

/// Environment variable overriding [`size_limit`].
pub const SIZE_LIMIT_VAR: &str = "MEALY_SIZE_LIMIT";

const DEFAULT_SIZE_LIMIT: usize = 1 << 24;

/// Largest table (power automaton entries, helix graph nodes, raw census
/// space) the library agrees to build. Read from `MEALY_SIZE_LIMIT`, falling
/// back to 2^24.
pub fn size_limit() -> usize {
    std::env::var(SIZE_LIMIT_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_SIZE_LIMIT)
}
