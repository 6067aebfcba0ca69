//! Finite cycle sets: validation, retraction, the correspondence with
//! involutive solutions of the set-theoretic Yang-Baxter equation, explicit
//! constructions of indecomposable examples, and classification by
//! exhaustive search.
//!
//! A cycle set is stored as its table of left multiplications: row `x` is the
//! permutation `σ_x: y -> x·y`. Permutations compose right to left,
//! `(p ∘ q)(i) = p(q(i))`.

pub mod arith;
pub mod classify;
pub mod construct;
pub mod cycleset;
pub mod perm;

pub use classify::{ClassificationReport, ClassifyError, SearchConfig, SearchMode};
pub use cycleset::{validate, CycleSet, Solution, ValidationError, Violation};
pub use perm::{GroupType, PermError, PermGroup, Permutation};
