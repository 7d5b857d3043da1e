//! Grothendieck groups of isotypic categories of abelian varieties.
//!
//! The group `K0(A)` of the category of varieties isogenous to powers of a
//! simple `A` splits as `Z ⊕ G(A)`, where `G(A)` is the dimension-zero part.
//! This crate computes canonical forms for `G(A)` in the endomorphism cases
//! that admit an explicit description, decides equality of classes, applies
//! duality, and produces checkable certificates that isogenous quotients of
//! equal degree define the same class.

pub mod arith;
pub mod error;
pub mod isoctx;
pub mod k0;
pub mod kernels;
pub mod oracle;
pub mod quadforms;

pub use arith::{FactoredRational, IntMatrix, TorsionSubgroup};
pub use error::{Error, Result};
pub use isoctx::{ContextSpec, GClass, IsogenyContext, Structure};
pub use k0::{Derivation, K0Element, KeyRelation};
pub use kernels::KernelMultiset;
pub use quadforms::{ClassGroup, PrimeClass, QuadForm, SquareClasses};
