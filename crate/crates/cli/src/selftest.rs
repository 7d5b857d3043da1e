//! Agreement runs between the main algorithms and the brute-force oracles.

use std::collections::BTreeSet;

use k0_core::arith::{all_subgroups, is_prime_u64, matrix_isogeny_degree};
use k0_core::k0::{validate_derivation, Deriver};
use k0_core::oracle::{
    enumerate_reduced_forms, exhaustive_subgroups, in_principal_genus, is_fundamental_naive,
    lattice_degree_oracle, norm_witness_search, prime_form_oracle, squares_oracle,
};
use k0_core::quadforms::{class_group, prime_class, square_classes};
use k0_core::{FactoredRational, IntMatrix, IsogenyContext};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct SelftestOptions {
    pub max_disc: u64,
    pub max_level: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            max_disc: 2000,
            max_level: 10,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub name: &'static str,
    pub checked: usize,
    pub disagreements: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            disagreements: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.disagreements.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

// Genus and prime-form oracles are quadratic in |d|; keep them small.
const GENUS_DISC_CAP: u64 = 300;
const NORM_DISCS: [i64; 5] = [-4, -8, -20, -23, -47];

fn fundamentals(max: u64) -> impl Iterator<Item = i64> {
    (3..=max as i64).map(|d| -d).filter(|&d| is_fundamental_naive(d))
}

fn class_groups(opts: &SelftestOptions) -> Suite {
    let mut s = Suite::new("class groups vs enumeration");
    for d in fundamentals(opts.max_disc) {
        let ok = match class_group(&BigInt::from(d)) {
            Ok(cg) => cg.elements() == enumerate_reduced_forms(d).as_slice(),
            Err(_) => false,
        };
        s.record(ok, || format!("d = {d}"));
    }
    s
}

fn squares(opts: &SelftestOptions) -> Suite {
    let mut s = Suite::new("square subgroups vs principal genus");
    for d in fundamentals(opts.max_disc.min(GENUS_DISC_CAP)) {
        let ok = square_classes(&BigInt::from(d))
            .map(|sc| sc.square_subgroup() == &squares_oracle(d))
            .unwrap_or(false);
        s.record(ok, || format!("d = {d}"));
    }
    s
}

fn prime_forms(opts: &SelftestOptions) -> Suite {
    let mut s = Suite::new("prime classes vs brute-force prime forms");
    for d in fundamentals(opts.max_disc.min(GENUS_DISC_CAP)) {
        for l in (2..200u64).filter(|&l| is_prime_u64(l)) {
            let main = prime_class(&BigUint::from(l), &BigInt::from(d)).map(|c| c.form().cloned());
            s.record(main.ok() == Some(prime_form_oracle(l, d)), || format!("l = {l}, d = {d}"));
        }
    }
    s
}

fn norms() -> Suite {
    let mut s = Suite::new("norm tests vs witness search");
    for d in NORM_DISCS {
        let ctx = IsogenyContext::cm(d).expect("fundamental");
        for l in (2..500u64).filter(|&l| is_prime_u64(l)) {
            let main = ctx.is_norm(&FactoredRational::from_u64(l)).expect("CM context");
            let witness = norm_witness_search(l, 1, d, 50);
            let ok = match (main, witness) {
                (true, found) => found.is_some(),
                (false, Some(_)) => false,
                (false, None) => prime_form_oracle(l, d).is_none_or(|f| !in_principal_genus(&f)),
            };
            s.record(ok, || format!("l = {l}, d = {d}, is_norm = {main}"));
        }
    }
    s
}

fn subgroups(opts: &SelftestOptions) -> Suite {
    let mut s = Suite::new("subgroup lattices vs exhaustive enumeration");
    for n in 1..=opts.max_level {
        let main: BTreeSet<_> = all_subgroups(n).iter().map(|c| c.elements()).collect();
        let oracle: BTreeSet<_> = exhaustive_subgroups(n).into_iter().map(|c| c.points).collect();
        s.record(main == oracle, || format!("n = {n}"));
    }
    s
}

fn derivations(opts: &SelftestOptions) -> Suite {
    let mut s = Suite::new("same-degree derivations");
    for n in 1..=opts.max_level {
        let deriver = Deriver::new(n);
        let subs: Vec<_> = deriver
            .subgroups()
            .iter()
            .filter(|c| c.order() == n)
            .copied()
            .collect();
        for c1 in &subs {
            for c2 in &subs {
                let ok = deriver
                    .derive(c1, c2)
                    .map(|d| validate_derivation(&d).ok)
                    .unwrap_or(false);
                s.record(ok, || format!("n = {n}: {c1} ~ {c2}"));
            }
        }
    }
    s
}

fn matrix_degrees() -> Suite {
    let mut s = Suite::new("matrix degrees vs lattice index");
    let range = -3i64..=3;
    for a in range.clone() {
        for b in range.clone() {
            for c in range.clone() {
                for d in range.clone() {
                    let m = IntMatrix::from_rows([[a, b], [c, d]]);
                    if a * d == b * c {
                        continue;
                    }
                    for g in 1..=2 {
                        let ok = match (matrix_isogeny_degree(&m, g), lattice_degree_oracle(&m, g)) {
                            (Ok(deg), Ok(index)) => deg.is_integer() && deg.numerator() == index,
                            _ => false,
                        };
                        s.record(ok, || format!("M = {m}, g = {g}"));
                    }
                }
            }
        }
    }
    s
}

pub fn run_selftest(opts: &SelftestOptions) -> Vec<Suite> {
    vec![
        class_groups(opts),
        squares(opts),
        prime_forms(opts),
        norms(),
        subgroups(opts),
        derivations(opts),
        matrix_degrees(),
    ]
}
