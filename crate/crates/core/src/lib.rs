//! Exact mutation of skew-symmetrizable integer matrices and their weighted
//! diagrams, with mutation-acyclicity tests, minimal representatives of
//! 3-vertex classes, a gcd invariant and a bounded class explorer.

pub mod classify;
pub mod cli;
pub mod diagram;
pub mod exactnum;
pub mod explore;
pub mod invariants;
pub mod matrix;
pub mod triple;

pub use classify::{classify, classify_diagram, Classification, MutationClassKind};
pub use diagram::{Diagram, DiagramError};
pub use exactnum::{compare_radical_sums, isqrt_exact, Nat, RadicalSum};
pub use explore::{explore, verify_unique_minimum, ClassExploration, IsoKey, Verdict};
pub use invariants::{gcd_invariant, Flavor, GcdInvariant};
pub use matrix::{CompanionMatrix, MatrixError, SkewSymmetrizableMatrix};
pub use triple::{CanonicalForm, RadicalTriple};
