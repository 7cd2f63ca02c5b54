//! Workbench for Jónsson–Tarski algebras.
//!
//! * [`term`]: terms, normal forms, the entailment decision procedure and
//!   its certificate checker.
//! * [`algebra`]: the algebra interface shared by concrete carriers, term
//!   evaluation, axiom probing and bounded subalgebra closure.
//! * [`jomega`]: the countable algebra on the naturals given by a
//!   diagonal pairing table.
//! * [`stage`]: finite truncations of the transfinite table construction
//!   on ordinals below `w*K`.
//! * [`corpus`]: seeded random terms and identities for sweeps.
//! * [`exec`]: sequential or rayon-backed evaluation of index ranges.

pub mod algebra;
pub mod corpus;
pub mod exec;
pub mod jomega;
pub mod stage;
pub mod term;

pub use exec::Exec;
