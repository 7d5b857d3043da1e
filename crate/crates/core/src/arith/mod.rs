//! Exact integer arithmetic: factorization, normal forms, torsion subgroups.

mod factor;
mod lattice;
mod matrix;

pub use factor::{
    factor, factor_u64, is_prime, is_prime_u64, kronecker, sqrt_mod_prime, FactoredRational,
};
pub use lattice::{all_subgroups, TorsionSubgroup};
pub use matrix::{matrix_isogeny_degree, smith_normal_form, IntMatrix, SmithForm};
