//! Finite subgroups of `(Q/Z)^2` killed by a fixed level `n`.
//!
//! A subgroup `C = L / Z^2` with `Z^2 ⊆ L ⊆ (1/n) Z^2` is stored through the
//! integer lattice `nL`, which sits between `nZ^2` and `Z^2`. Its row-style
//! Hermite basis `(a, b), (0, c)` with `a, c > 0` and `0 <= b < c` is unique,
//! so structural equality is subgroup equality.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSubgroup", into = "RawSubgroup")]
pub struct TorsionSubgroup {
    level: u64,
    a: u64,
    b: u64,
    c: u64,
}

#[derive(Serialize, Deserialize)]
struct RawSubgroup {
    level: u64,
    hnf: [u64; 3],
    order: u64,
}

impl TryFrom<RawSubgroup> for TorsionSubgroup {
    type Error = Error;

    fn try_from(raw: RawSubgroup) -> Result<Self> {
        let [a, b, c] = raw.hnf;
        let s = TorsionSubgroup::from_hnf(raw.level, a, b, c)?;
        if s.order() != raw.order {
            return Err(Error::InvalidSubgroup(format!(
                "declared order {} but basis {s} has order {}",
                raw.order,
                s.order()
            )));
        }
        Ok(s)
    }
}

impl From<TorsionSubgroup> for RawSubgroup {
    fn from(s: TorsionSubgroup) -> Self {
        RawSubgroup {
            level: s.level,
            hnf: [s.a, s.b, s.c],
            order: s.order(),
        }
    }
}

impl TorsionSubgroup {
    pub fn trivial(level: u64) -> Self {
        assert!(level > 0, "level must be positive");
        Self {
            level,
            a: level,
            b: 0,
            c: level,
        }
    }

    /// The full `n`-torsion `(Z/n)^2`.
    pub fn full(level: u64) -> Self {
        assert!(level > 0, "level must be positive");
        Self {
            level,
            a: 1,
            b: 0,
            c: 1,
        }
    }

    /// Validates an explicit Hermite basis `(a, b), (0, c)` of `nL`.
    pub fn from_hnf(level: u64, a: u64, b: u64, c: u64) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidSubgroup(format!("({a},{b},{c}) at level {level}: {why}")));
        if level == 0 {
            return bad("level must be positive");
        }
        if a == 0 || c == 0 {
            return bad("diagonal must be positive");
        }
        if !level.is_multiple_of(a) || !level.is_multiple_of(c) {
            return bad("diagonal must divide the level");
        }
        if b >= c {
            return bad("off-diagonal entry must be reduced modulo the last pivot");
        }
        if !((level / a) as u128 * b as u128).is_multiple_of(c as u128) {
            return bad("lattice does not contain nZ^2");
        }
        Ok(Self { level, a, b, c })
    }

    /// Subgroup generated by the points `(x/n, y/n)`.
    pub fn generated_by(level: u64, points: &[(i64, i64)]) -> Self {
        let mut s = Self::trivial(level);
        for &(x, y) in points {
            s = s.with_vector(x as i128, y as i128);
        }
        s
    }

    fn with_vector(self, x: i128, y: i128) -> Self {
        let n = self.level as i128;
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (x, y) = (x.rem_euclid(n), y.rem_euclid(n));
        let ext = a.extended_gcd(&x);
        let g = ext.gcd;
        let new_b = ext.x * b + ext.y * y;
        // the other unimodular combination has zero first coordinate
        let tail = (x / g) * b - (a / g) * y;
        let new_c = c.gcd(&tail);
        let new_b = new_b.rem_euclid(new_c);
        Self {
            level: self.level,
            a: g as u64,
            b: new_b as u64,
            c: new_c as u64,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn hnf(&self) -> (u64, u64, u64) {
        (self.a, self.b, self.c)
    }

    /// `[L : Z^2] = n^2 / (a c)`.
    pub fn order(&self) -> u64 {
        (self.level / self.a) * (self.level / self.c)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Whether `(x/n, y/n)` lies in the subgroup.
    pub fn contains_point(&self, x: i64, y: i64) -> bool {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (x, y) = (x as i128, y as i128);
        x % a == 0 && (y - (x / a) * b) % c == 0
    }

    pub fn contains(&self, other: &TorsionSubgroup) -> bool {
        self.level == other.level
            && self.contains_point(other.a as i64, other.b as i64)
            && self.contains_point(0, other.c as i64)
    }

    fn check_level(&self, other: &TorsionSubgroup) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &TorsionSubgroup) -> Result<Self> {
        self.check_level(other)?;
        Ok(self
            .with_vector(other.a as i128, other.b as i128)
            .with_vector(0, other.c as i128))
    }

    /// Annihilator under the pairing `(v, w) -> v·w mod n`; an involution
    /// exchanging sums and intersections.
    pub fn annihilator(&self) -> Self {
        let n = self.level as i128;
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let off = -(n * b) / (a * c);
        Self::trivial(self.level)
            .with_vector(n / a, 0)
            .with_vector(off, n / c)
    }

    pub fn intersect(&self, other: &TorsionSubgroup) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Re-expresses the subgroup at another level; fails if it is not killed
    /// by the new level.
    pub fn with_level(&self, level: u64) -> Result<Self> {
        if level == self.level {
            return Ok(*self);
        }
        let scale = |v: u64| -> Option<i64> {
            let num = v as u128 * level as u128;
            num.is_multiple_of(self.level as u128).then(|| (num / self.level as u128) as i64)
        };
        match (scale(self.a), scale(self.b), scale(self.c)) {
            (Some(a), Some(b), Some(c)) => Ok(Self::generated_by(level, &[(a, b), (0, c)])),
            _ => Err(Error::InvalidSubgroup(format!(
                "{self} is not contained in the {level}-torsion"
            ))),
        }
    }

    /// Whether `k` kills the subgroup modulo `base`, i.e. `kC ⊆ B`.
    pub fn killed_mod(&self, k: u64, base: &TorsionSubgroup) -> bool {
        let k = k as i64;
        base.contains_point(k * self.a as i64, k * self.b as i64)
            && base.contains_point(0, k * self.c as i64)
    }

    /// Explicit points `(x, y)` with `(x/n, y/n)` in the subgroup, reduced mod `n`.
    pub fn elements(&self) -> BTreeSet<(u64, u64)> {
        let n = self.level;
        let mut out = BTreeSet::new();
        for i in 0..n / self.a {
            for j in 0..n / self.c {
                let x = (i * self.a) % n;
                let y = (i * self.b + j * self.c) % n;
                out.insert((x, y));
            }
        }
        out
    }
}

impl fmt::Display for TorsionSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

/// Every subgroup of `(Z/n)^2`, sorted by Hermite basis.
pub fn all_subgroups(level: u64) -> Vec<TorsionSubgroup> {
    let divisors: Vec<u64> = (1..=level).filter(|d| level.is_multiple_of(*d)).collect();
    let mut out = Vec::new();
    for &a in &divisors {
        for &c in &divisors {
            for b in 0..c {
                if let Ok(s) = TorsionSubgroup::from_hnf(level, a, b, c) {
                    out.push(s);
                }
            }
        }
    }
    out.sort();
    out
}
