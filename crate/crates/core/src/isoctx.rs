//! Endomorphism contexts and canonical forms for `G(A) ≅ Z+/deg(D)`.
//!
//! Each context fixes how degrees of isogenies are read modulo the degrees
//! realized by the endomorphism algebra:
//!
//! | context          | `G(A)`                                   |
//! |------------------|------------------------------------------|
//! | `EndZ(g)`        | `Q+/Q+^(2g)`                             |
//! | `CM(d)`          | `C/C^2 ⊕ (Z/2)^(inert primes)`           |
//! | `Supersingular`  | `0`                                      |
//! | `OrdinaryCM(d,p)`| as `CM(d)`                               |
//! | `CharPEndZ(p)`   | `Z ⊕ H_p`, index 2 in `Z ⊕ Q+/Q+^2`      |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, kronecker, FactoredRational};
use crate::error::{Error, Result};
use crate::quadforms::{prime_class, square_classes, PrimeClass, QuadForm, SquareClasses};

/// Raw, unvalidated description of a context as read from a file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl ContextSpec {
    pub fn end_z(g: u32) -> Self {
        Self {
            case: "end_z".into(),
            g: Some(g),
            ..Self::default()
        }
    }

    pub fn cm(disc: i64) -> Self {
        Self {
            case: "cm".into(),
            disc: Some(disc),
            ..Self::default()
        }
    }

    pub fn supersingular(p: u64) -> Self {
        Self {
            case: "supersingular".into(),
            p: Some(p),
            ..Self::default()
        }
    }

    pub fn ordinary_cm(disc: i64, p: u64) -> Self {
        Self {
            case: "ordinary_cm".into(),
            disc: Some(disc),
            p: Some(p),
            ..Self::default()
        }
    }

    pub fn char_p_end_z(p: u64) -> Self {
        Self {
            case: "char_p_end_z".into(),
            p: Some(p),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsogenyContext {
    EndZ { g: u32 },
    Cm { classes: SquareClasses },
    Supersingular { p: BigUint },
    OrdinaryCm { classes: SquareClasses, p: BigUint },
    CharPEndZ { p: BigUint },
}

fn field<T>(value: Option<T>, name: &str, case: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidContext(format!("case {case} requires field `{name}`")))
}

fn forbid<T>(value: &Option<T>, name: &str, case: &str) -> Result<()> {
    match value {
        Some(_) => Err(Error::InvalidContext(format!(
            "field `{name}` does not apply to case {case}"
        ))),
        None => Ok(()),
    }
}

fn prime_field(p: Option<u64>, case: &str) -> Result<BigUint> {
    let p = BigUint::from(field(p, "p", case)?);
    if !is_prime(&p) {
        return Err(Error::NotPrime(p));
    }
    Ok(p)
}

impl IsogenyContext {
    pub fn from_spec(spec: &ContextSpec) -> Result<Self> {
        let case = spec.case.as_str();
        match case {
            "end_z" => {
                forbid(&spec.disc, "disc", case)?;
                forbid(&spec.p, "p", case)?;
                let g = field(spec.g, "g", case)?;
                if g < 1 {
                    return Err(Error::InvalidContext("g must be at least 1".into()));
                }
                Ok(IsogenyContext::EndZ { g })
            }
            "cm" => {
                forbid(&spec.g, "g", case)?;
                forbid(&spec.p, "p", case)?;
                let disc = BigInt::from(field(spec.disc, "disc", case)?);
                Ok(IsogenyContext::Cm {
                    classes: square_classes(&disc)?,
                })
            }
            "supersingular" => {
                forbid(&spec.g, "g", case)?;
                forbid(&spec.disc, "disc", case)?;
                Ok(IsogenyContext::Supersingular {
                    p: prime_field(spec.p, case)?,
                })
            }
            "ordinary_cm" => {
                forbid(&spec.g, "g", case)?;
                let disc = BigInt::from(field(spec.disc, "disc", case)?);
                let p = prime_field(spec.p, case)?;
                let classes = square_classes(&disc)?;
                if kronecker(&disc, &BigInt::from(p.clone())) != 1 {
                    return Err(Error::PrimeNotSplit { p, disc });
                }
                Ok(IsogenyContext::OrdinaryCm { classes, p })
            }
            "char_p_end_z" => {
                forbid(&spec.g, "g", case)?;
                forbid(&spec.disc, "disc", case)?;
                Ok(IsogenyContext::CharPEndZ {
                    p: prime_field(spec.p, case)?,
                })
            }
            "real_multiplication" | "totally_real" | "cm_field" | "quaternion" | "number_field" => {
                Err(Error::UnsupportedCenter(format!(
                    "case {case}: norm groups of centers other than Q or an imaginary quadratic field are not implemented"
                )))
            }
            other => Err(Error::InvalidContext(format!("unknown case `{other}`"))),
        }
    }

    pub fn end_z(g: u32) -> Result<Self> {
        Self::from_spec(&ContextSpec::end_z(g))
    }

    pub fn cm(disc: i64) -> Result<Self> {
        Self::from_spec(&ContextSpec::cm(disc))
    }

    pub fn supersingular(p: u64) -> Result<Self> {
        Self::from_spec(&ContextSpec::supersingular(p))
    }

    pub fn ordinary_cm(disc: i64, p: u64) -> Result<Self> {
        Self::from_spec(&ContextSpec::ordinary_cm(disc, p))
    }

    pub fn char_p_end_z(p: u64) -> Result<Self> {
        Self::from_spec(&ContextSpec::char_p_end_z(p))
    }

    fn square_classes(&self) -> Option<&SquareClasses> {
        match self {
            IsogenyContext::Cm { classes } | IsogenyContext::OrdinaryCm { classes, .. } => {
                Some(classes)
            }
            _ => None,
        }
    }

    /// Characteristic of the base field (0 or p).
    pub fn characteristic(&self) -> Option<&BigUint> {
        match self {
            IsogenyContext::EndZ { .. } | IsogenyContext::Cm { .. } => None,
            IsogenyContext::Supersingular { p }
            | IsogenyContext::OrdinaryCm { p, .. }
            | IsogenyContext::CharPEndZ { p } => Some(p),
        }
    }

    pub fn identity(&self) -> GClass {
        match self {
            IsogenyContext::EndZ { g } => GClass::EndZ {
                g: *g,
                exps: BTreeMap::new(),
            },
            IsogenyContext::Cm { classes } | IsogenyContext::OrdinaryCm { classes, .. } => {
                GClass::Cm {
                    disc: classes.disc().clone(),
                    coset: classes.identity(),
                    inert_odd: BTreeSet::new(),
                }
            }
            IsogenyContext::Supersingular { .. } => GClass::Unit,
            IsogenyContext::CharPEndZ { p } => GClass::CharP {
                p: p.clone(),
                a: BigInt::zero(),
                odd_primes: BTreeSet::new(),
            },
        }
    }

    /// Class of `dist_A(B)` for an object at distance `q` from `A^n`.
    pub fn dist_class(&self, q: &FactoredRational) -> Result<GClass> {
        match self {
            IsogenyContext::EndZ { g } => {
                let modulus = 2 * i64::from(*g);
                let exps = q
                    .exponents()
                    .iter()
                    .filter_map(|(p, e)| {
                        let r = e.rem_euclid(modulus) as u32;
                        (r != 0).then(|| (p.clone(), r))
                    })
                    .collect();
                Ok(GClass::EndZ { g: *g, exps })
            }
            IsogenyContext::Cm { classes } | IsogenyContext::OrdinaryCm { classes, .. } => {
                let d = classes.disc();
                let mut coset = classes.identity();
                let mut inert_odd = BTreeSet::new();
                for (l, e) in q.exponents() {
                    // C/C^2 and the inert slots are 2-torsion: only parity matters
                    if e.rem_euclid(2) == 0 {
                        continue;
                    }
                    match prime_class(l, d)? {
                        PrimeClass::Inert => {
                            inert_odd.insert(l.clone());
                        }
                        PrimeClass::Ramified(f) | PrimeClass::Split(f) => {
                            coset = coset.compose(&f)?;
                        }
                    }
                }
                Ok(GClass::Cm {
                    disc: d.clone(),
                    coset: classes.canonical(&coset)?,
                    inert_odd,
                })
            }
            IsogenyContext::Supersingular { .. } => Ok(GClass::Unit),
            IsogenyContext::CharPEndZ { p } => {
                if q.divisible_by_prime(p) {
                    return Err(Error::PPartNeedsKernel(p.clone()));
                }
                Ok(GClass::CharP {
                    p: p.clone(),
                    a: BigInt::zero(),
                    odd_primes: q.odd_primes().cloned().collect(),
                })
            }
        }
    }

    fn check(&self, x: &GClass) -> Result<()> {
        let ok = match (self, x) {
            (IsogenyContext::EndZ { g }, GClass::EndZ { g: h, .. }) => g == h,
            (IsogenyContext::Cm { classes }, GClass::Cm { disc, .. })
            | (IsogenyContext::OrdinaryCm { classes, .. }, GClass::Cm { disc, .. }) => {
                classes.disc() == disc
            }
            (IsogenyContext::Supersingular { .. }, GClass::Unit) => true,
            (IsogenyContext::CharPEndZ { p }, GClass::CharP { p: q, .. }) => p == q,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!("class {x} does not belong to {self}")))
        }
    }

    pub fn g_mul(&self, x: &GClass, y: &GClass) -> Result<GClass> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (x, y) {
            (GClass::EndZ { g, exps: ex }, GClass::EndZ { exps: ey, .. }) => {
                let modulus = 2 * g;
                let mut exps = ex.clone();
                for (p, e) in ey {
                    let r = (exps.get(p).copied().unwrap_or(0) + e) % modulus;
                    if r == 0 {
                        exps.remove(p);
                    } else {
                        exps.insert(p.clone(), r);
                    }
                }
                GClass::EndZ { g: *g, exps }
            }
            (
                GClass::Cm {
                    disc,
                    coset: cx,
                    inert_odd: ix,
                },
                GClass::Cm {
                    coset: cy,
                    inert_odd: iy,
                    ..
                },
            ) => {
                let classes = self.square_classes().expect("checked CM context");
                GClass::Cm {
                    disc: disc.clone(),
                    coset: classes.canonical(&cx.compose(cy)?)?,
                    inert_odd: ix.symmetric_difference(iy).cloned().collect(),
                }
            }
            (GClass::Unit, GClass::Unit) => GClass::Unit,
            (
                GClass::CharP {
                    p,
                    a: ax,
                    odd_primes: ox,
                },
                GClass::CharP {
                    a: ay,
                    odd_primes: oy,
                    ..
                },
            ) => GClass::CharP {
                p: p.clone(),
                a: ax + ay,
                odd_primes: ox.symmetric_difference(oy).cloned().collect(),
            },
            _ => unreachable!("both classes checked against the context"),
        })
    }

    /// Inverse in `G(A)`; realizes `[B] -> [B^]` on the dimension-zero part.
    pub fn g_dual(&self, x: &GClass) -> Result<GClass> {
        self.check(x)?;
        Ok(match x {
            GClass::EndZ { g, exps } => GClass::EndZ {
                g: *g,
                exps: exps
                    .iter()
                    .map(|(p, e)| (p.clone(), 2 * g - e))
                    .collect(),
            },
            GClass::Cm {
                disc,
                coset,
                inert_odd,
            } => {
                let classes = self.square_classes().expect("checked CM context");
                GClass::Cm {
                    disc: disc.clone(),
                    coset: classes.canonical(&coset.inverse())?,
                    inert_odd: inert_odd.clone(),
                }
            }
            GClass::Unit => GClass::Unit,
            GClass::CharP { p, a, odd_primes } => GClass::CharP {
                p: p.clone(),
                a: -a,
                odd_primes: odd_primes.clone(),
            },
        })
    }

    /// `x^k` for an arbitrary integer `k`.
    pub fn g_pow(&self, x: &GClass, k: &BigInt) -> Result<GClass> {
        self.check(x)?;
        let odd = k.is_odd();
        Ok(match x {
            GClass::EndZ { g, exps } => {
                let modulus = BigInt::from(2 * g);
                GClass::EndZ {
                    g: *g,
                    exps: exps
                        .iter()
                        .filter_map(|(p, e)| {
                            let r = (k * BigInt::from(*e)).mod_floor(&modulus);
                            let r: u32 = r.try_into().expect("residue below 2g");
                            (r != 0).then(|| (p.clone(), r))
                        })
                        .collect(),
                }
            }
            GClass::Cm { .. } if odd => x.clone(),
            GClass::Cm { .. } => self.identity(),
            GClass::Unit => GClass::Unit,
            GClass::CharP { p, a, odd_primes } => GClass::CharP {
                p: p.clone(),
                a: a * k,
                odd_primes: if odd { odd_primes.clone() } else { BTreeSet::new() },
            },
        })
    }

    /// Whether `q` is a norm from `K^×` (CM contexts only).
    pub fn is_norm(&self, q: &FactoredRational) -> Result<bool> {
        if self.square_classes().is_none() {
            return Err(Error::ContextMismatch(format!(
                "norm test needs an imaginary quadratic context, got {self}"
            )));
        }
        Ok(self.dist_class(q)? == self.identity())
    }

    pub fn g_structure(&self) -> Structure {
        let factors = match self {
            IsogenyContext::EndZ { g } => vec![CyclicFactor::PerPrime {
                order: 2 * u64::from(*g),
                primes: PrimeScope::All,
            }],
            IsogenyContext::Cm { classes } | IsogenyContext::OrdinaryCm { classes, .. } => {
                let mut v = Vec::new();
                if classes.two_rank() > 0 {
                    v.push(CyclicFactor::Finite {
                        order: 2,
                        copies: classes.two_rank(),
                    });
                }
                v.push(CyclicFactor::PerPrime {
                    order: 2,
                    primes: PrimeScope::Inert(classes.disc().clone()),
                });
                v
            }
            IsogenyContext::Supersingular { .. } => Vec::new(),
            IsogenyContext::CharPEndZ { p } => vec![
                CyclicFactor::Infinite,
                CyclicFactor::PerPrime {
                    order: 2,
                    primes: PrimeScope::AllExcept(p.clone()),
                },
            ],
        };
        Structure { factors }
    }
}

impl fmt::Display for IsogenyContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsogenyContext::EndZ { g } => write!(f, "EndZ(g={g})"),
            IsogenyContext::Cm { classes } => write!(f, "CM(d={})", classes.disc()),
            IsogenyContext::Supersingular { p } => write!(f, "Supersingular(p={p})"),
            IsogenyContext::OrdinaryCm { classes, p } => {
                write!(f, "OrdinaryCM(d={}, p={p})", classes.disc())
            }
            IsogenyContext::CharPEndZ { p } => write!(f, "CharPEndZ(p={p})"),
        }
    }
}

/// Canonical element of `G(A)`; equal as group elements iff structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GClass {
    /// Exponents modulo `2g`, zero residues omitted.
    EndZ { g: u32, exps: BTreeMap<BigUint, u32> },
    /// Coset of `C^2` plus the inert primes occurring to an odd power.
    Cm {
        disc: BigInt,
        coset: QuadForm,
        inert_odd: BTreeSet<BigUint>,
    },
    Unit,
    /// `(deg_p, prime-to-p square class)`.
    CharP {
        p: BigUint,
        a: BigInt,
        odd_primes: BTreeSet<BigUint>,
    },
}

impl GClass {
    pub fn is_identity(&self) -> bool {
        match self {
            GClass::EndZ { exps, .. } => exps.is_empty(),
            GClass::Cm {
                disc,
                coset,
                inert_odd,
            } => inert_odd.is_empty() && *coset == QuadForm::principal(disc),
            GClass::Unit => true,
            GClass::CharP { a, odd_primes, .. } => a.is_zero() && odd_primes.is_empty(),
        }
    }
}

fn write_primes(f: &mut fmt::Formatter<'_>, primes: &BTreeSet<BigUint>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, p) in primes.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{p}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for GClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GClass::EndZ { g, exps } => {
                if exps.is_empty() {
                    return write!(f, "1 mod Q+^{}", 2 * g);
                }
                for (i, (p, e)) in exps.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    write!(f, "{p}^{e}")?;
                }
                write!(f, " mod Q+^{}", 2 * g)
            }
            GClass::Cm {
                coset, inert_odd, ..
            } => {
                write!(f, "{coset}·C^2 + inert")?;
                write_primes(f, inert_odd)
            }
            GClass::Unit => write!(f, "0"),
            GClass::CharP { a, odd_primes, .. } => {
                write!(f, "({a}, ")?;
                write_primes(f, odd_primes)?;
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scope", content = "value", rename_all = "snake_case")]
pub enum PrimeScope {
    All,
    AllExcept(BigUint),
    /// Primes inert in the field of this discriminant.
    Inert(BigInt),
}

/// One cyclic summand (or family of summands) of `G(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CyclicFactor {
    Infinite,
    Finite { order: u64, copies: u32 },
    PerPrime { order: u64, primes: PrimeScope },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub factors: Vec<CyclicFactor>,
}

impl Structure {
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0 (trivial group)");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            match factor {
                CyclicFactor::Infinite => write!(f, "Z")?,
                CyclicFactor::Finite { order, copies: 1 } => write!(f, "Z/{order}")?,
                CyclicFactor::Finite { order, copies } => write!(f, "(Z/{order})^{copies}")?,
                CyclicFactor::PerPrime { order, primes } => match primes {
                    PrimeScope::All => write!(f, "⊕_l Z/{order}")?,
                    PrimeScope::AllExcept(p) => write!(f, "⊕_(l≠{p}) Z/{order}")?,
                    PrimeScope::Inert(d) => write!(f, "⊕_(l inert in Q(√{d})) Z/{order}")?,
                },
            }
        }
        Ok(())
    }
}
