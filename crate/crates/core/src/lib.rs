//! Exact arithmetic for rational quadratic forms and the flat-manifold data
//! behind commensurability certificates of cusped arithmetic hyperbolic
//! manifolds of simplest type.
//!
//! The crate decides rational and projective equivalence of non-degenerate
//! rational quadratic forms through their complete invariants (rank, signature,
//! discriminant, Hasse-Witt invariants), realizes forms with prescribed local
//! invariants, builds and checks Bieberbach-group presentations (Im-Kim
//! families, Generalized Hantzsche-Wendt groups), and assembles the two halves
//! into machine-checkable certificates.
//!
//! All computation is exact: `BigRational` coefficients, integer lattices in
//! Hermite normal form, and residue symbols evaluated by closed-form local
//! formulas. Nothing is floating point.

pub mod arith;
pub mod bieberbach;
pub mod equivalence;
pub mod error;
pub mod forms;
pub mod local;
pub mod matrix;
pub mod pipeline;
pub mod realization;

pub use arith::{Place, Rational, SquareClass};
pub use error::{Error, Result};
pub use forms::{DiagonalForm, Signature, SymmetricForm};
pub use local::InvariantProfile;
