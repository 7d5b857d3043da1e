use serde::{Deserialize, Serialize};

use crate::arith::{FactoredRational, TorsionSubgroup};
use crate::error::{Error, Result};
use crate::isoctx::IsogenyContext;

/// Relation `[E/B] + [E/(C1+C2)] = [E/C1] + [E/C2]` for subgroups meeting
/// exactly in `B`: the exact sequence `0 -> A -> A1 x A2 -> A3 -> 0` over
/// `A = E/B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyRelation {
    pub base: TorsionSubgroup,
    pub c1: TorsionSubgroup,
    pub c2: TorsionSubgroup,
    pub top: TorsionSubgroup,
}

/// Relation over `E` itself (trivial base).
pub fn key_relation(level: u64, c1: &TorsionSubgroup, c2: &TorsionSubgroup) -> Result<KeyRelation> {
    KeyRelation::over(&TorsionSubgroup::trivial(level), c1, c2)
}

impl KeyRelation {
    pub fn over(
        base: &TorsionSubgroup,
        c1: &TorsionSubgroup,
        c2: &TorsionSubgroup,
    ) -> Result<KeyRelation> {
        let meet = c1.intersect(c2)?;
        if meet.level() != base.level() {
            return Err(Error::LevelMismatch {
                left: meet.level(),
                right: base.level(),
            });
        }
        if !c1.contains(base) || !c2.contains(base) {
            return Err(Error::InvalidSubgroup(format!(
                "base {base} is not contained in both kernels"
            )));
        }
        if meet != *base {
            return Err(Error::NontrivialIntersection);
        }
        Ok(KeyRelation {
            base: *base,
            c1: *c1,
            c2: *c2,
            top: c1.sum(c2)?,
        })
    }

    pub fn level(&self) -> u64 {
        self.base.level()
    }

    /// Recomputes every condition from the stored subgroups.
    pub fn check(&self) -> std::result::Result<(), String> {
        let level = self.level();
        for (name, s) in [("c1", &self.c1), ("c2", &self.c2), ("top", &self.top)] {
            if s.level() != level {
                return Err(format!("{name} has level {} but base has {level}", s.level()));
            }
        }
        if !self.c1.contains(&self.base) || !self.c2.contains(&self.base) {
            return Err(format!("base {} not inside both kernels", self.base));
        }
        let meet = self.c1.intersect(&self.c2).map_err(|e| e.to_string())?;
        if meet != self.base {
            return Err(format!(
                "kernels {} and {} meet in {meet}, not in the base {}",
                self.c1, self.c2, self.base
            ));
        }
        let sum = self.c1.sum(&self.c2).map_err(|e| e.to_string())?;
        if sum != self.top {
            return Err(format!("top {} differs from the kernel sum {sum}", self.top));
        }
        Ok(())
    }

    /// The four terms with their signs in `[base] + [top] - [c1] - [c2] = 0`.
    pub fn terms(&self) -> [(TorsionSubgroup, i64); 4] {
        [(self.base, 1), (self.top, 1), (self.c1, -1), (self.c2, -1)]
    }

    /// Image under `deg`: `|base|·|top| = |c1|·|c2|` in `G(A)`.
    pub fn balances_in(&self, ctx: &IsogenyContext) -> Result<bool> {
        let class = |s: &TorsionSubgroup| ctx.dist_class(&FactoredRational::from_u64(s.order()));
        let lhs = ctx.g_mul(&class(&self.base)?, &class(&self.top)?)?;
        let rhs = ctx.g_mul(&class(&self.c1)?, &class(&self.c2)?)?;
        Ok(lhs == rhs)
    }
}
