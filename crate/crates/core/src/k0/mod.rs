//! Grothendieck-group calculus: canonical classes `(n, g) ∈ Z ⊕ G(A)`,
//! kernel relations, and same-degree derivations.

mod derive;
mod relation;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::FactoredRational;
use crate::error::{Error, Result};
use crate::isoctx::{GClass, IsogenyContext};
use crate::kernels::{kernel_class, KernelMultiset};

pub use derive::{derive_same_degree, validate_derivation, Derivation, Deriver, Step, Validation};
pub use relation::{key_relation, KeyRelation};

/// How an object's distance from `A^n` is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Degree {
    Rational(FactoredRational),
    Kernel(KernelMultiset),
}

/// Class in `K0(A) ≅ Z ⊕ G(A)`: multiplicity of `[A]` and the `G(A)` part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K0Element {
    pub n: BigInt,
    pub g: GClass,
}

impl K0Element {
    pub fn zero(ctx: &IsogenyContext) -> Self {
        Self {
            n: BigInt::zero(),
            g: ctx.identity(),
        }
    }
}

impl fmt::Display for K0Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.g)
    }
}

/// Class of an object `B` of dimension `n·dim A` given an isogeny `A^n -> B`.
pub fn k0_of_object(ctx: &IsogenyContext, n: &BigUint, dist: &Degree) -> Result<K0Element> {
    if n.is_zero() {
        return Err(Error::InvalidContext("object multiplicity must be at least 1".into()));
    }
    let g = match dist {
        Degree::Rational(q) => ctx.dist_class(q)?,
        Degree::Kernel(k) => kernel_class(ctx, k)?,
    };
    Ok(K0Element {
        n: BigInt::from(n.clone()),
        g,
    })
}

pub fn k0_add(ctx: &IsogenyContext, x: &K0Element, y: &K0Element) -> Result<K0Element> {
    Ok(K0Element {
        n: &x.n + &y.n,
        g: ctx.g_mul(&x.g, &y.g)?,
    })
}

pub fn k0_neg(ctx: &IsogenyContext, x: &K0Element) -> Result<K0Element> {
    Ok(K0Element {
        n: -&x.n,
        g: ctx.g_dual(&x.g)?,
    })
}

pub fn k0_scale(ctx: &IsogenyContext, x: &K0Element, k: &BigInt) -> Result<K0Element> {
    Ok(K0Element {
        n: &x.n * k,
        g: ctx.g_pow(&x.g, k)?,
    })
}

/// Equality in `K0(A)`; canonical forms make this structural.
pub fn k0_eq(x: &K0Element, y: &K0Element) -> bool {
    x == y
}

/// `[B] -> [B^]`: fixes the multiplicity, inverts the `G(A)` part.
pub fn k0_dual(ctx: &IsogenyContext, x: &K0Element) -> Result<K0Element> {
    Ok(K0Element {
        n: x.n.clone(),
        g: ctx.g_dual(&x.g)?,
    })
}
