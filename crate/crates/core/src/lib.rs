//! Exact enumeration of pattern-avoiding linear extensions of comb posets.
//!
//! The crate offers several independent ways to count the same numbers:
//! pruned brute-force enumeration ([`enumerate`]), closed forms and recurrences
//! ([`formulas`]), generating trees ([`gentree`]) and an exact power series
//! ([`series`]). [`engine`] puts them behind a common trait so callers can pick
//! one by name or let `auto` choose.

pub mod engine;
pub mod enumerate;
pub mod formulas;
pub mod gentree;
pub mod perm;
pub mod poset;
pub mod series;

/// Exact nonnegative count.
pub type BigCount = num_bigint::BigUint;

pub use engine::{CountEngine, CountQuery, Counted, EngineError, EngineRegistry, Method};
pub use perm::{PatternSet, Permutation};
pub use poset::{CombShape, CombSpec, Family, Poset};
