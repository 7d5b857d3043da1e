//! Positive definite binary quadratic forms and class groups of imaginary
//! quadratic orders.
//!
//! A form `(a, b, c)` stands for `ax^2 + bxy + cy^2` with discriminant
//! `b^2 - 4ac < 0`. It is reduced when `|b| <= a <= c`, with `b >= 0`
//! whenever `|b| = a` or `a = c`; every class has exactly one reduced form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime, kronecker, sqrt_mod_prime};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// The form with leading coefficient `a` and middle `b` for discriminant
    /// `d`; `b^2 - d` must be divisible by `4a`.
    pub fn from_a_b(a: BigInt, b: BigInt, d: &BigInt) -> Self {
        let c = (&b * &b - d) / (BigInt::from(4) * &a);
        Self { a, b, c }
    }

    /// Identity of the class group: `x^2 - (d/4) y^2` or `x^2 + xy + (1-d)/4 y^2`.
    pub fn principal(d: &BigInt) -> Self {
        let b = if d.is_even() { BigInt::zero() } else { BigInt::one() };
        Self::from_a_b(BigInt::one(), b, d)
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a.is_positive() && self.discriminant().is_negative()
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.abs();
        self.is_positive_definite()
            && abs_b <= self.a
            && self.a <= self.c
            && !((abs_b == self.a || self.a == self.c) && self.b.is_negative())
    }

    /// Moves `b` into `(-a, a]` without changing the class.
    fn normalize(&mut self, d: &BigInt) {
        let two_a = &self.a + &self.a;
        let r = (&self.a - &self.b).div_floor(&two_a);
        if !r.is_zero() {
            self.b += &two_a * r;
            self.c = (&self.b * &self.b - d) / (BigInt::from(4) * &self.a);
        }
    }

    /// The unique reduced form in the class of `self`.
    pub fn reduce(&self) -> Result<Self> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite {
                a: self.a.clone(),
                b: self.b.clone(),
                c: self.c.clone(),
            });
        }
        let d = self.discriminant();
        let mut f = self.clone();
        f.normalize(&d);
        while f.a > f.c {
            f = Self {
                a: f.c,
                b: -f.b,
                c: f.a,
            };
            f.normalize(&d);
        }
        if f.a == f.c && f.b.is_negative() {
            f.b = -f.b;
        }
        Ok(f)
    }

    /// Gauss composition, returning the reduced representative of the product class.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let d = self.discriminant();
        let d2 = other.discriminant();
        if d != d2 {
            return Err(Error::DiscriminantMismatch { left: d, right: d2 });
        }
        if !self.is_positive_definite() {
            return self.reduce();
        }
        if !other.is_positive_definite() {
            return other.reduce();
        }
        let (a1, b1) = (&self.a, &self.b);
        let (a2, b2) = (&other.a, &other.b);
        let mean = (b1 + b2) / 2;
        // e = u a1 + v a2 + w (b1 + b2)/2
        let g1 = a1.extended_gcd(a2);
        let g = g1.gcd.extended_gcd(&mean);
        let e = g.gcd;
        let (u, v, w) = (&g1.x * &g.x, &g1.y * &g.x, g.y);
        let a3 = (a1 * a2) / (&e * &e);
        let num: BigInt = &u * a1 * b2 + &v * a2 * b1 + &w * ((b1 * b2 + &d) / 2);
        let b3 = (num / &e).mod_floor(&(&a3 + &a3));
        QuadForm::from_a_b(a3, b3, &d).reduce()
    }

    pub fn pow(&self, k: &BigInt) -> Result<Self> {
        let d = self.discriminant();
        let mut base = if k.is_negative() {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = k.magnitude().clone();
        let mut acc = QuadForm::principal(&d);
        while !e.is_zero() {
            if e.is_odd() {
                acc = acc.compose(&base)?;
            }
            base = base.compose(&base)?;
            e >>= 1u32;
        }
        Ok(acc)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Whether `d` is the discriminant of the maximal order of an imaginary
/// quadratic field.
pub fn is_fundamental(d: &BigInt) -> bool {
    if !d.is_negative() {
        return false;
    }
    let squarefree = |m: &BigInt| factor(m.magnitude()).exponents().values().all(|&e| e == 1);
    match d.mod_floor(&BigInt::from(4)).to_string().as_str() {
        "1" => squarefree(d),
        "0" => {
            let m: BigInt = d / 4;
            let r = m.mod_floor(&BigInt::from(4));
            (r == BigInt::from(2) || r == BigInt::from(3)) && squarefree(&m)
        }
        _ => false,
    }
}

fn require_fundamental(d: &BigInt) -> Result<()> {
    if is_fundamental(d) {
        Ok(())
    } else {
        Err(Error::NonMaximalOrder(d.clone()))
    }
}

/// The class group `Pic(O_K)` as its list of reduced forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup {
    disc: BigInt,
    elements: Vec<QuadForm>,
}

impl ClassGroup {
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn elements(&self) -> &[QuadForm] {
        &self.elements
    }

    pub fn h(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> QuadForm {
        QuadForm::principal(&self.disc)
    }
}

pub fn class_group(d: &BigInt) -> Result<ClassGroup> {
    require_fundamental(d)?;
    let abs_d = d.magnitude();
    let a_max = BigInt::from((abs_d / 3u32).sqrt());
    let four = BigInt::from(4);
    let mut elements = Vec::new();
    let mut a = BigInt::one();
    while a <= a_max {
        let mut b: BigInt = -&a + 1;
        while b <= a {
            let num: BigInt = &b * &b - d;
            let den = &four * &a;
            if num.is_multiple_of(&den) {
                let f = QuadForm {
                    a: a.clone(),
                    b: b.clone(),
                    c: num / den,
                };
                if f.is_reduced() && f.a.gcd(&f.b).gcd(&f.c).is_one() {
                    elements.push(f);
                }
            }
            b += 1;
        }
        a += 1;
    }
    elements.sort();
    Ok(ClassGroup {
        disc: d.clone(),
        elements,
    })
}

/// The subgroup of squares `C^2` and a canonical representative for every
/// coset of `C / C^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareClasses {
    group: ClassGroup,
    squares: BTreeSet<QuadForm>,
    coset_rep: BTreeMap<QuadForm, QuadForm>,
}

impl SquareClasses {
    pub fn group(&self) -> &ClassGroup {
        &self.group
    }

    pub fn disc(&self) -> &BigInt {
        &self.group.disc
    }

    pub fn square_subgroup(&self) -> &BTreeSet<QuadForm> {
        &self.squares
    }

    /// `[C : C^2]`.
    pub fn index(&self) -> usize {
        self.group.h() / self.squares.len()
    }

    /// 2-rank of the class group, `log2 [C : C^2]`.
    pub fn two_rank(&self) -> u32 {
        self.index().trailing_zeros()
    }

    pub fn coset_reps(&self) -> BTreeSet<QuadForm> {
        self.coset_rep.values().cloned().collect()
    }

    /// Canonical coset representative of the class of `f` in `C / C^2`.
    pub fn canonical(&self, f: &QuadForm) -> Result<QuadForm> {
        let r = f.reduce()?;
        if r.discriminant() != self.group.disc {
            return Err(Error::DiscriminantMismatch {
                left: r.discriminant(),
                right: self.group.disc.clone(),
            });
        }
        Ok(self.coset_rep[&r].clone())
    }

    pub fn is_square(&self, f: &QuadForm) -> Result<bool> {
        Ok(self.squares.contains(&f.reduce()?))
    }

    pub fn identity(&self) -> QuadForm {
        self.group.identity()
    }
}

pub fn square_classes(d: &BigInt) -> Result<SquareClasses> {
    let group = class_group(d)?;
    let squares: BTreeSet<QuadForm> = group
        .elements
        .iter()
        .map(|g| g.compose(g))
        .collect::<Result<_>>()?;
    let mut coset_rep = BTreeMap::new();
    for x in &group.elements {
        if coset_rep.contains_key(x) {
            continue;
        }
        let coset: Vec<QuadForm> = squares
            .iter()
            .map(|s| x.compose(s))
            .collect::<Result<_>>()?;
        let rep = coset.iter().min().expect("cosets are nonempty").clone();
        for y in coset {
            coset_rep.insert(y, rep.clone());
        }
    }
    Ok(SquareClasses {
        group,
        squares,
        coset_rep,
    })
}

/// How a rational prime decomposes in `O_K`, with the class of a prime above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeClass {
    Inert,
    Ramified(QuadForm),
    Split(QuadForm),
}

impl PrimeClass {
    pub fn form(&self) -> Option<&QuadForm> {
        match self {
            PrimeClass::Inert => None,
            PrimeClass::Ramified(f) | PrimeClass::Split(f) => Some(f),
        }
    }
}

/// Reduced class of the form `(l, b, (b^2 - d)/4l)`, with `b` the least
/// nonnegative solution of `b^2 ≡ d (mod 4l)`.
pub fn prime_class(l: &BigUint, d: &BigInt) -> Result<PrimeClass> {
    if !is_prime(l) {
        return Err(Error::NotPrime(l.clone()));
    }
    let li = BigInt::from(l.clone());
    let chi = kronecker(d, &li);
    if chi == -1 {
        return Ok(PrimeClass::Inert);
    }
    let four_l = BigInt::from(4) * &li;
    let b = if l == &BigUint::from(2u32) {
        (0..4)
            .map(BigInt::from)
            .find(|b| (b * b - d).is_multiple_of(&four_l))
            .expect("non-inert 2 has a square root of d mod 8")
    } else {
        let r = BigInt::from(sqrt_mod_prime(d, l).expect("non-inert prime has a root"));
        let mut candidates = [r.clone(), &li - &r];
        for cand in candidates.iter_mut() {
            if cand.is_odd() != d.is_odd() {
                *cand += &li;
            }
        }
        candidates.into_iter().min().unwrap()
    };
    let form = QuadForm::from_a_b(li, b, d).reduce()?;
    Ok(if chi == 0 {
        PrimeClass::Ramified(form)
    } else {
        PrimeClass::Split(form)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    fn d(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(q(1, 0, 1).reduce().unwrap(), q(1, 0, 1));
        assert_eq!(q(3, 4, 2).reduce().unwrap(), q(1, 0, 2));
        assert_eq!(q(2, 2, 3).reduce().unwrap(), q(2, 2, 3));
        assert!(q(2, -2, 3).reduce().unwrap().is_reduced());
        assert_eq!(q(3, 2, 3).reduce().unwrap(), q(3, 2, 3));
        assert_eq!(q(3, -2, 3).reduce().unwrap(), q(3, 2, 3));
    }

    #[test]
    fn reduce_rejects_indefinite() {
        assert!(matches!(
            q(1, 3, 1).reduce(),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(q(-1, 0, -1).reduce().is_err());
    }

    #[test]
    fn compose_examples() {
        let f = q(2, 2, 3);
        assert_eq!(QuadForm::principal(&d(-20)).compose(&f).unwrap(), f);
        assert_eq!(f.compose(&f).unwrap(), q(1, 0, 5));
        assert_eq!(f.compose(&f.inverse()).unwrap(), q(1, 0, 5));
        assert!(matches!(
            f.compose(&q(1, 0, 1)),
            Err(Error::DiscriminantMismatch { .. })
        ));
    }

    #[test]
    fn class_group_examples() {
        let c4 = class_group(&d(-4)).unwrap();
        assert_eq!(c4.elements(), &[q(1, 0, 1)]);
        let c20 = class_group(&d(-20)).unwrap();
        assert_eq!(c20.elements(), &[q(1, 0, 5), q(2, 2, 3)]);
        assert_eq!(class_group(&d(-23)).unwrap().h(), 3);
        assert_eq!(class_group(&d(-3)).unwrap().elements(), &[q(1, 1, 1)]);
        assert!(matches!(class_group(&d(-12)), Err(Error::NonMaximalOrder(_))));
        assert!(matches!(class_group(&d(-16)), Err(Error::NonMaximalOrder(_))));
        assert!(class_group(&d(5)).is_err());
    }

    #[test]
    fn fundamental_discriminants() {
        let fundamental = [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24];
        for v in -24..0 {
            assert_eq!(is_fundamental(&d(v)), fundamental.contains(&v), "d = {v}");
        }
    }

    #[test]
    fn square_class_examples() {
        assert_eq!(square_classes(&d(-23)).unwrap().index(), 1);
        assert_eq!(square_classes(&d(-20)).unwrap().index(), 2);
        assert_eq!(square_classes(&d(-4)).unwrap().index(), 1);
        // Z/2 x Z/2
        let s = square_classes(&d(-84)).unwrap();
        assert_eq!(s.index(), 4);
        assert_eq!(s.two_rank(), 2);
    }

    #[test]
    fn prime_class_examples() {
        let l = |v: u32| BigUint::from(v);
        assert_eq!(prime_class(&l(3), &d(-4)).unwrap(), PrimeClass::Inert);
        assert_eq!(prime_class(&l(5), &d(-4)).unwrap(), PrimeClass::Split(q(1, 0, 1)));
        assert_eq!(prime_class(&l(3), &d(-20)).unwrap(), PrimeClass::Split(q(2, 2, 3)));
        assert_eq!(prime_class(&l(2), &d(-20)).unwrap(), PrimeClass::Ramified(q(2, 2, 3)));
        assert_eq!(prime_class(&l(5), &d(-20)).unwrap(), PrimeClass::Ramified(q(1, 0, 5)));
        assert_eq!(prime_class(&l(2), &d(-3)).unwrap(), PrimeClass::Inert);
        assert!(matches!(prime_class(&l(9), &d(-4)), Err(Error::NotPrime(_))));
    }

    #[test]
    fn split_prime_times_conjugate_is_principal() {
        for disc in [-20i64, -23, -47, -56, -84] {
            let dd = d(disc);
            for p in (2u32..300).filter(|&p| is_prime(&BigUint::from(p))) {
                if let PrimeClass::Split(f) = prime_class(&BigUint::from(p), &dd).unwrap() {
                    assert_eq!(f.compose(&f.inverse()).unwrap(), QuadForm::principal(&dd));
                }
            }
        }
    }

    #[test]
    fn group_axioms_small() {
        for disc in [-20i64, -23, -47, -56, -84, -87] {
            let c = class_group(&d(disc)).unwrap();
            let id = c.identity();
            for x in c.elements() {
                assert_eq!(x.compose(&id).unwrap(), *x);
                assert_eq!(x.compose(&x.inverse()).unwrap(), id);
                assert_eq!(x.reduce().unwrap(), *x);
                for y in c.elements() {
                    let xy = x.compose(y).unwrap();
                    assert_eq!(xy, y.compose(x).unwrap());
                    for z in c.elements() {
                        assert_eq!(xy.compose(z).unwrap(), x.compose(&y.compose(z).unwrap()).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn pow_respects_order() {
        let c = class_group(&d(-47)).unwrap();
        for x in c.elements() {
            assert_eq!(x.pow(&BigInt::from(5)).unwrap(), c.identity());
            assert_eq!(x.pow(&BigInt::from(-1)).unwrap(), x.inverse().reduce().unwrap());
        }
    }
}
