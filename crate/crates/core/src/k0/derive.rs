//! Certificates that two quotients of `E` by subgroups of the same order `n`
//! have the same class in `K0`, built from kernel relations.
//!
//! Every object is a quotient `E/C` with `C ⊆ E[n]`, so all subgroups in a
//! certificate share the level `n`. A quotient curve `E/B` is handled by
//! working with subgroups that contain `B`.
//!
//! Prime order `l`: with `C1 ≠ C2` pick a third line `C` in `C1 + C2` and use
//! the relations over `C1, C` and `C2, C`; their difference is `[E/C1] - [E/C2]`.
//! Composite order: pick prime-order subgroups `P1 ⊆ C1`, `P2 ⊆ C2`, find an
//! order-`n` subgroup `C ⊇ P1 + P2`, and recurse over `E/P1` (for `C1` vs `C`)
//! and `E/P2` (for `C` vs `C2`).
//!
//! The certificate is a flat list of steps. `Open` starts a sub-goal over a
//! base subgroup, `Key` contributes a signed relation, and `Close` asserts that
//! the relations collected since the matching `Open` cancel down to the goal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::relation::KeyRelation;
use crate::arith::{all_subgroups, factor_u64, TorsionSubgroup};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Open {
        base: TorsionSubgroup,
        from: TorsionSubgroup,
        to: TorsionSubgroup,
    },
    Key {
        sign: i8,
        relation: KeyRelation,
    },
    Close {
        from: TorsionSubgroup,
        to: TorsionSubgroup,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub level: u64,
    pub from: TorsionSubgroup,
    pub to: TorsionSubgroup,
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn key_steps(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Key { .. }))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Certificate(e.to_string()))
    }
}

/// Derivation search over the subgroups of `E[n]` for a fixed `n`.
pub struct Deriver {
    level: u64,
    subgroups: Vec<TorsionSubgroup>,
}

impl Deriver {
    pub fn new(level: u64) -> Self {
        Self {
            level,
            subgroups: all_subgroups(level),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn subgroups(&self) -> &[TorsionSubgroup] {
        &self.subgroups
    }

    /// Both subgroups must have order equal to the level.
    pub fn derive(&self, c1: &TorsionSubgroup, c2: &TorsionSubgroup) -> Result<Derivation> {
        for c in [c1, c2] {
            if c.level() != self.level {
                return Err(Error::LevelMismatch {
                    left: c.level(),
                    right: self.level,
                });
            }
        }
        if c1.order() != self.level || c2.order() != self.level {
            return Err(Error::OrderMismatch {
                left: c1.order(),
                right: c2.order(),
            });
        }
        let mut steps = Vec::new();
        self.prove(&TorsionSubgroup::trivial(self.level), c1, c2, &mut steps)?;
        Ok(Derivation {
            level: self.level,
            from: *c1,
            to: *c2,
            steps,
        })
    }

    fn first(&self, pred: impl Fn(&TorsionSubgroup) -> bool) -> Option<TorsionSubgroup> {
        self.subgroups.iter().copied().find(|s| pred(s))
    }

    fn prove(
        &self,
        base: &TorsionSubgroup,
        x: &TorsionSubgroup,
        y: &TorsionSubgroup,
        steps: &mut Vec<Step>,
    ) -> Result<()> {
        if x == y {
            return Ok(());
        }
        steps.push(Step::Open {
            base: *base,
            from: *x,
            to: *y,
        });
        let m = x.order() / base.order();
        let primes: Vec<u64> = factor_u64(m)
            .exponents()
            .keys()
            .map(|p| u64::try_from(p).expect("prime below the level"))
            .collect();
        let search_failed = |what: &str| {
            Error::DerivationSearch(format!("no {what} over base {base} for goal {x} ~ {y}"))
        };

        if primes.len() == 1 && factor_u64(m).exponents().values().all(|&e| e == 1) {
            let top = x.sum(y)?;
            let third = self
                .first(|z| {
                    z.order() == x.order() && top.contains(z) && z.contains(base) && z != x && z != y
                })
                .ok_or_else(|| search_failed("third line"))?;
            steps.push(Step::Key {
                sign: -1,
                relation: KeyRelation::over(base, x, &third)?,
            });
            steps.push(Step::Key {
                sign: 1,
                relation: KeyRelation::over(base, y, &third)?,
            });
        } else {
            let (l1, l2) = match primes.as_slice() {
                [l] => (*l, *l),
                [l1, l2, ..] => (*l1, *l2),
                [] => unreachable!("m > 1 when x != y"),
            };
            let point_in = |c: &TorsionSubgroup, l: u64| {
                self.first(|s| s.order() == base.order() * l && c.contains(s) && s.contains(base))
            };
            let p1 = point_in(x, l1).ok_or_else(|| search_failed("prime-order point in the first kernel"))?;
            let p2 = point_in(y, l2).ok_or_else(|| search_failed("prime-order point in the second kernel"))?;
            let span = p1.sum(&p2)?;
            let mid = self
                .first(|z| z.order() == x.order() && z.contains(&span) && z.killed_mod(m, base))
                .ok_or_else(|| search_failed("intermediate kernel"))?;
            self.prove(&p1, x, &mid, steps)?;
            self.prove(&p2, &mid, y, steps)?;
        }
        steps.push(Step::Close { from: *x, to: *y });
        Ok(())
    }
}

/// Derivation of `[E/c1] = [E/c2]` for subgroups of order `n`, at level `n`.
pub fn derive_same_degree(n: u64, c1: &TorsionSubgroup, c2: &TorsionSubgroup) -> Result<Derivation> {
    if n == 0 {
        return Err(Error::InvalidSubgroup("degree must be positive".into()));
    }
    for c in [c1, c2] {
        if c.order() != n {
            return Err(Error::OrderMismatch {
                left: c.order(),
                right: n,
            });
        }
    }
    Deriver::new(n).derive(&c1.with_level(n)?, &c2.with_level(n)?)
}

/// Outcome of checking a certificate, with the reasons for any rejection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub ok: bool,
    pub trace: Vec<String>,
}

type FormalSum = BTreeMap<TorsionSubgroup, i64>;

fn add_term(sum: &mut FormalSum, s: TorsionSubgroup, k: i64) {
    let slot = sum.entry(s).or_insert(0);
    *slot += k;
    if *slot == 0 {
        sum.remove(&s);
    }
}

fn goal(from: &TorsionSubgroup, to: &TorsionSubgroup) -> FormalSum {
    let mut sum = FormalSum::new();
    add_term(&mut sum, *from, 1);
    add_term(&mut sum, *to, -1);
    sum
}

struct Frame {
    base: TorsionSubgroup,
    from: TorsionSubgroup,
    to: TorsionSubgroup,
    sum: FormalSum,
}

/// Re-checks a certificate from scratch: every relation's subgroup conditions,
/// every sub-goal's cancellation, and the total telescoping sum.
pub fn validate_derivation(d: &Derivation) -> Validation {
    let mut trace = Vec::new();
    let ok = match check(d, &mut trace) {
        Ok(()) => true,
        Err(reason) => {
            trace.push(format!("rejected: {reason}"));
            false
        }
    };
    Validation { ok, trace }
}

fn check(d: &Derivation, trace: &mut Vec<String>) -> std::result::Result<(), String> {
    let level = d.level;
    let same_level = |s: &TorsionSubgroup| {
        if s.level() == level {
            Ok(())
        } else {
            Err(format!("subgroup {s} has level {} instead of {level}", s.level()))
        }
    };
    same_level(&d.from)?;
    same_level(&d.to)?;
    if d.from.order() != d.to.order() {
        return Err(format!(
            "goal orders differ: {} vs {}",
            d.from.order(),
            d.to.order()
        ));
    }
    if d.steps.is_empty() {
        return if d.from == d.to {
            trace.push("empty derivation of a reflexive goal".into());
            Ok(())
        } else {
            Err("empty derivation for distinct subgroups".into())
        };
    }

    let mut stack: Vec<Frame> = Vec::new();
    let mut total: Option<FormalSum> = None;
    let mut flat = FormalSum::new();

    for (i, step) in d.steps.iter().enumerate() {
        if total.is_some() {
            return Err(format!("step {i}: content after the top-level goal closed"));
        }
        match step {
            Step::Open { base, from, to } => {
                for s in [base, from, to] {
                    same_level(s).map_err(|e| format!("step {i}: {e}"))?;
                }
                if !from.contains(base) || !to.contains(base) {
                    return Err(format!("step {i}: base {base} not inside {from} and {to}"));
                }
                if from.order() != to.order() {
                    return Err(format!("step {i}: sub-goal {from} ~ {to} has unequal orders"));
                }
                match stack.last() {
                    Some(parent) if !base.contains(&parent.base) => {
                        return Err(format!(
                            "step {i}: base {base} does not refine enclosing base {}",
                            parent.base
                        ));
                    }
                    None if (*from, *to) != (d.from, d.to) => {
                        return Err(format!("step {i}: top-level goal {from} ~ {to} is not the certificate goal"));
                    }
                    _ => {}
                }
                trace.push(format!("step {i}: open {from} ~ {to} over {base}"));
                stack.push(Frame {
                    base: *base,
                    from: *from,
                    to: *to,
                    sum: FormalSum::new(),
                });
            }
            Step::Key { sign, relation } => {
                let frame = stack
                    .last_mut()
                    .ok_or_else(|| format!("step {i}: relation outside any goal"))?;
                if *sign != 1 && *sign != -1 {
                    return Err(format!("step {i}: sign must be ±1, got {sign}"));
                }
                same_level(&relation.base).map_err(|e| format!("step {i}: {e}"))?;
                relation.check().map_err(|e| format!("step {i}: {e}"))?;
                if !relation.base.contains(&frame.base) {
                    return Err(format!("step {i}: relation base is not over the goal base"));
                }
                for (s, k) in relation.terms() {
                    add_term(&mut frame.sum, s, k * i64::from(*sign));
                    add_term(&mut flat, s, k * i64::from(*sign));
                }
                trace.push(format!(
                    "step {i}: {}relation over {} with kernels {}, {}",
                    if *sign > 0 { "+" } else { "-" },
                    relation.base,
                    relation.c1,
                    relation.c2
                ));
            }
            Step::Close { from, to } => {
                let frame = stack
                    .pop()
                    .ok_or_else(|| format!("step {i}: close without open"))?;
                if (frame.from, frame.to) != (*from, *to) {
                    return Err(format!(
                        "step {i}: closes {from} ~ {to} but the open goal is {} ~ {}",
                        frame.from, frame.to
                    ));
                }
                if frame.sum != goal(from, to) {
                    return Err(format!("step {i}: relations do not cancel to [E/{from}] - [E/{to}]"));
                }
                trace.push(format!("step {i}: cancelled to [E/{from}] = [E/{to}]"));
                match stack.last_mut() {
                    Some(parent) => {
                        for (s, k) in frame.sum {
                            add_term(&mut parent.sum, s, k);
                        }
                    }
                    None => total = Some(frame.sum),
                }
            }
        }
    }
    if !stack.is_empty() {
        return Err(format!("{} goal(s) left open", stack.len()));
    }
    let expected = goal(&d.from, &d.to);
    if total.as_ref() != Some(&expected) || flat != expected {
        return Err("signed sum of relations does not telescope to the goal".into());
    }
    trace.push(format!("telescopes to [E/{}] - [E/{}]", d.from, d.to));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines(level: u64) -> Vec<TorsionSubgroup> {
        all_subgroups(level)
            .into_iter()
            .filter(|s| s.order() == level)
            .collect()
    }

    #[test]
    fn reflexive_goal_is_empty() {
        let c = TorsionSubgroup::generated_by(5, &[(1, 3)]);
        let d = derive_same_degree(5, &c, &c).unwrap();
        assert!(d.steps.is_empty());
        assert!(validate_derivation(&d).ok);
    }

    #[test]
    fn order_two_uses_third_line() {
        let l = lines(2);
        assert_eq!(l.len(), 3);
        let d = derive_same_degree(2, &l[0], &l[1]).unwrap();
        assert_eq!(d.key_steps(), 2);
        let thirds: Vec<_> = d
            .steps
            .iter()
            .filter_map(|s| match s {
                Step::Key { relation, .. } => Some(relation.c2),
                _ => None,
            })
            .collect();
        assert!(thirds.iter().all(|t| *t == l[2]));
        assert!(validate_derivation(&d).ok);
    }

    #[test]
    fn order_six_axes() {
        let c1 = TorsionSubgroup::generated_by(6, &[(1, 0)]);
        let c2 = TorsionSubgroup::generated_by(6, &[(0, 1)]);
        let d = derive_same_degree(6, &c1, &c2).unwrap();
        let v = validate_derivation(&d);
        assert!(v.ok, "{:?}", v.trace);
    }

    #[test]
    fn non_cyclic_goals() {
        // order 4 at level 4: the full 2-torsion against a cyclic subgroup
        let full2 = TorsionSubgroup::generated_by(4, &[(2, 0), (0, 2)]);
        let cyc = TorsionSubgroup::generated_by(4, &[(1, 1)]);
        let d = derive_same_degree(4, &full2, &cyc).unwrap();
        assert!(validate_derivation(&d).ok);
    }

    #[test]
    fn goal_given_at_other_level() {
        let c1 = TorsionSubgroup::generated_by(2, &[(1, 0), (0, 1)]);
        let c2 = TorsionSubgroup::generated_by(4, &[(1, 0)]);
        let d = derive_same_degree(4, &c1, &c2).unwrap();
        assert_eq!(d.level, 4);
        assert!(validate_derivation(&d).ok);
    }

    #[test]
    fn order_mismatch() {
        let c1 = TorsionSubgroup::generated_by(6, &[(1, 0)]);
        let c2 = TorsionSubgroup::generated_by(6, &[(0, 2)]);
        assert!(matches!(
            derive_same_degree(6, &c1, &c2),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn corrupted_certificates_rejected() {
        let c1 = TorsionSubgroup::generated_by(12, &[(1, 0)]);
        let c2 = TorsionSubgroup::generated_by(12, &[(0, 1)]);
        let d = derive_same_degree(12, &c1, &c2).unwrap();
        assert!(validate_derivation(&d).ok);

        let empty = Derivation {
            steps: Vec::new(),
            ..d.clone()
        };
        assert!(!validate_derivation(&empty).ok);

        let mut flipped = d.clone();
        if let Some(Step::Key { sign, .. }) = flipped.steps.iter_mut().find(|s| matches!(s, Step::Key { .. })) {
            *sign = -*sign;
        }
        assert!(!validate_derivation(&flipped).ok);

        let mut swapped = d.clone();
        let other = TorsionSubgroup::generated_by(12, &[(1, 1)]);
        for s in swapped.steps.iter_mut() {
            if let Step::Key { relation, .. } = s {
                relation.c1 = other;
                break;
            }
        }
        assert!(!validate_derivation(&swapped).ok);

        let mut truncated = d.clone();
        truncated.steps.pop();
        assert!(!validate_derivation(&truncated).ok);
    }

    #[test]
    fn json_round_trip() {
        let c1 = TorsionSubgroup::generated_by(6, &[(1, 0)]);
        let c2 = TorsionSubgroup::generated_by(6, &[(1, 1)]);
        let d = derive_same_degree(6, &c1, &c2).unwrap();
        let text = d.to_json();
        assert_eq!(Derivation::from_json(&text).unwrap(), d);
        assert!(Derivation::from_json("{\"level\": 6}").is_err());
    }
}
