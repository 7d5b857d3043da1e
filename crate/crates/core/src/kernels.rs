//! Kernels of isogenies in characteristic `p`, tracked by Jordan–Hölder counts.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{smith_normal_form, FactoredRational, IntMatrix};
use crate::error::{Error, Result};
use crate::isoctx::{GClass, IsogenyContext};

/// Composition factors of a finite kernel over a field of characteristic `p`:
/// copies of `Z/p`, `μ_p`, `α_p`, and the order of the prime-to-`p` part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelMultiset {
    p: BigUint,
    et_p: u64,
    mu_p: u64,
    alpha_p: u64,
    coprime: FactoredRational,
}

impl KernelMultiset {
    pub fn new(p: BigUint, et_p: u64, mu_p: u64, alpha_p: u64, coprime: FactoredRational) -> Result<Self> {
        if !coprime.is_one() && (!coprime.is_integer() || coprime.divisible_by_prime(&p)) {
            return Err(Error::InvalidKernel {
                p,
                coprime: coprime.to_string(),
            });
        }
        Ok(Self {
            p,
            et_p,
            mu_p,
            alpha_p,
            coprime,
        })
    }

    pub fn empty(p: BigUint) -> Self {
        Self {
            p,
            et_p: 0,
            mu_p: 0,
            alpha_p: 0,
            coprime: FactoredRational::one(),
        }
    }

    /// Kernel of Frobenius on an ordinary curve: a single `μ_p`.
    pub fn frobenius_ordinary(p: BigUint) -> Self {
        Self {
            mu_p: 1,
            ..Self::empty(p)
        }
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn et_p(&self) -> u64 {
        self.et_p
    }

    pub fn mu_p(&self) -> u64 {
        self.mu_p
    }

    pub fn alpha_p(&self) -> u64 {
        self.alpha_p
    }

    pub fn coprime(&self) -> &FactoredRational {
        &self.coprime
    }

    /// `p^(et + mu + alpha) * coprime`.
    pub fn order(&self) -> FactoredRational {
        let p_part = self.et_p + self.mu_p + self.alpha_p;
        self.coprime
            .mul(&FactoredRational::from_prime_powers([(self.p.clone(), p_part as i64)]))
    }

    /// Étale minus multiplicative factor count.
    pub fn deg_p(&self) -> BigInt {
        BigInt::from(self.et_p) - BigInt::from(self.mu_p)
    }

    /// Cartier dual: `Z/p` and `μ_p` swap, `α_p` and the prime-to-`p` part stay.
    pub fn cartier_dual(&self) -> Self {
        Self {
            et_p: self.mu_p,
            mu_p: self.et_p,
            ..self.clone()
        }
    }

    /// Kernel of an extension, as a multiset union.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::ContextMismatch(format!(
                "kernels over characteristics {} and {}",
                self.p, other.p
            )));
        }
        Ok(Self {
            p: self.p.clone(),
            et_p: self.et_p + other.et_p,
            mu_p: self.mu_p + other.mu_p,
            alpha_p: self.alpha_p + other.alpha_p,
            coprime: self.coprime.mul(&other.coprime),
        })
    }
}

impl fmt::Display for KernelMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{zp:{}, mup:{}, alphap:{}, coprime:{}}}",
            self.et_p, self.mu_p, self.alpha_p, self.coprime
        )
    }
}

fn require_char_p(ctx: &IsogenyContext) -> Result<&BigUint> {
    match ctx {
        IsogenyContext::CharPEndZ { p } => Ok(p),
        other => Err(Error::ContextMismatch(format!(
            "expected an ordinary curve with End = Z in characteristic p, got {other}"
        ))),
    }
}

/// Kernel of the endomorphism of `E^n` given by `m`, on an ordinary `E`
/// with `E[p] ≅ Z/p ⊕ μ_p`.
pub fn kernel_of_matrix_endo(m: &IntMatrix, ctx: &IsogenyContext) -> Result<KernelMultiset> {
    let p = require_char_p(ctx)?;
    let pi = BigInt::from(p.clone());
    let smith = smith_normal_form(m)?;
    let mut p_count = 0u64;
    let mut coprime = FactoredRational::one();
    for d in smith.invariant_factors() {
        let mut rest = d.abs();
        while (&rest % &pi) == BigInt::from(0) {
            rest /= &pi;
            p_count += 1;
        }
        if !rest.is_one() {
            coprime = coprime.mul(&FactoredRational::from_integer(rest.magnitude()).pow(2));
        }
    }
    Ok(KernelMultiset {
        p: p.clone(),
        et_p: p_count,
        mu_p: p_count,
        alpha_p: 0,
        coprime,
    })
}

/// `tot(K) = (deg_p K, square class of the prime-to-p order)`.
pub fn tot_class(ctx: &IsogenyContext, k: &KernelMultiset) -> Result<GClass> {
    let p = require_char_p(ctx)?;
    if k.p != *p {
        return Err(Error::ContextMismatch(format!(
            "kernel over characteristic {} in context {ctx}",
            k.p
        )));
    }
    if k.alpha_p > 0 {
        return Err(Error::AlphaInOrdinary);
    }
    Ok(GClass::CharP {
        p: p.clone(),
        a: k.deg_p(),
        odd_primes: k.coprime.odd_primes().cloned().collect(),
    })
}

/// Whether `(a, q)` in `Z ⊕ Q+/Q+^2` lies in the image `Z ⊕ H_p` of `tot`.
pub fn tot_in_image(p: &BigUint, _a: &BigInt, q: &FactoredRational) -> bool {
    q.exponent(p) % 2 == 0
}

/// Class in `G(E)` of the quotient by a kernel, for any char-`p` context.
pub fn kernel_class(ctx: &IsogenyContext, k: &KernelMultiset) -> Result<GClass> {
    match ctx {
        IsogenyContext::CharPEndZ { .. } => tot_class(ctx, k),
        IsogenyContext::Supersingular { p } if *p == k.p => Ok(GClass::Unit),
        IsogenyContext::OrdinaryCm { p, .. } if *p == k.p => {
            if k.alpha_p > 0 {
                return Err(Error::AlphaInOrdinary);
            }
            ctx.dist_class(&k.order())
        }
        IsogenyContext::Supersingular { .. } | IsogenyContext::OrdinaryCm { .. } => {
            Err(Error::ContextMismatch(format!(
                "kernel over characteristic {} in context {ctx}",
                k.p
            )))
        }
        IsogenyContext::EndZ { .. } | IsogenyContext::Cm { .. } => Err(Error::ContextMismatch(
            format!("kernel literals need a characteristic p context, got {ctx}"),
        )),
    }
}

/// Smallest kernel mapping to `(a, n)` under `tot`, for `n` prime to `p`.
pub fn kernel_realizing(p: &BigUint, a: i64, n: &BigUint) -> Result<KernelMultiset> {
    let count = a.unsigned_abs();
    let (et_p, mu_p) = if a >= 0 { (count, 0) } else { (0, count) };
    let coprime = if n.to_u64() == Some(1) {
        FactoredRational::one()
    } else {
        FactoredRational::from_integer(n)
    };
    KernelMultiset::new(p.clone(), et_p, mu_p, 0, coprime)
}
