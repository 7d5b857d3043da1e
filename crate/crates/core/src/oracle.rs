//! Brute-force reference implementations.
//!
//! Nothing here calls the reduction, composition, factorization or lattice
//! code of the main path; the shared types are used only as containers.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{Signed, Zero};

use crate::arith::IntMatrix;
use crate::error::{Error, Result};
use crate::quadforms::QuadForm;

/// Trial-division check that `d` is a negative fundamental discriminant.
pub fn is_fundamental_naive(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let squarefree = |m: i64| (2..).take_while(|k| k * k <= m).all(|k| m % (k * k) != 0);
    let m = -d;
    match d.rem_euclid(4) {
        1 => squarefree(m),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && squarefree(-q)
        }
        _ => false,
    }
}

/// Every reduced primitive form of discriminant `d`, sorted.
pub fn enumerate_reduced_forms(d: i64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(QuadForm::new(a, b, c));
        }
        a += 1;
    }
    out.sort();
    out
}

/// Reduction by repeated swaps and translations, one step at a time.
pub fn reduce_naive(f: &QuadForm) -> QuadForm {
    let (mut a, mut b, mut c) = (f.a.clone(), f.b.clone(), f.c.clone());
    let two = BigInt::from(2);
    loop {
        if b > a {
            // x -> x - y
            c = &c - &b + &a;
            b -= &two * &a;
        } else if -&b >= a {
            c = &c + &b + &a;
            b += &two * &a;
        } else if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        } else {
            break;
        }
    }
    // here -a < b <= a and a <= c
    if a == c && b.is_negative() {
        b = -b;
    }
    QuadForm { a, b, c }
}

/// Primitive form `(l, b, c)` with the least `0 <= b < 2l` and
/// `b^2 ≡ d (mod 4l)`, reduced; `None` when no such `b` exists (inert `l`).
pub fn prime_form_oracle(l: u64, d: i64) -> Option<QuadForm> {
    let l = l as i64;
    let b = (0..2 * l).find(|b| (b * b - d).rem_euclid(4 * l) == 0)?;
    let c = (b * b - d) / (4 * l);
    Some(reduce_naive(&QuadForm::new(l, b, c)))
}

fn values_mod(f: &QuadForm, modulus: i64) -> BTreeSet<i64> {
    let (a, b, c) = (small(&f.a).rem_euclid(modulus), small(&f.b).rem_euclid(modulus), small(&f.c).rem_euclid(modulus));
    let mut vals = BTreeSet::new();
    for x in 0..modulus {
        for y in 0..modulus {
            let v = (a * x * x + b * x * y + c * y * y).rem_euclid(modulus);
            if v.gcd(&modulus) == 1 {
                vals.insert(v);
            }
        }
    }
    vals
}

fn small(n: &BigInt) -> i64 {
    i64::try_from(n).expect("oracle inputs are word-sized")
}

/// Whether `f` lies in the principal genus, i.e. represents the same units
/// modulo `|d|` as the principal form. For fundamental `d` the principal
/// genus is the subgroup of squares.
pub fn in_principal_genus(f: &QuadForm) -> bool {
    let d = small(&(&f.b * &f.b - BigInt::from(4) * &f.a * &f.c));
    let b0 = d.rem_euclid(2);
    let principal = QuadForm::new(1, b0, (b0 * b0 - d) / 4);
    values_mod(f, -d) == values_mod(&principal, -d)
}

/// Reduced forms in the principal genus.
pub fn squares_oracle(d: i64) -> BTreeSet<QuadForm> {
    enumerate_reduced_forms(d)
        .into_iter()
        .filter(in_principal_genus)
        .collect()
}

/// `Nm(x + y·w) = num·den·t^2`, where `w = √d/2` or `(1+√d)/2`; then
/// `(x + y·w)/(den·t)` has norm `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormWitness {
    pub x: i64,
    pub y: i64,
    pub t: u64,
}

const WITNESS_COORD_BOUND: i64 = 10_000;

/// Searches `t = 1..=bound` for an element of norm `num·den·t^2`.
pub fn norm_witness_search(num: u64, den: u64, d: i64, bound: u64) -> Option<NormWitness> {
    let dd = i128::from(-d);
    let odd = d.rem_euclid(4) == 1;
    for t in 1..=bound {
        let n = i128::from(num) * i128::from(den) * i128::from(t) * i128::from(t);
        for y in 0..=i128::from(WITNESS_COORD_BOUND) {
            if odd {
                // 4·Nm = (2x + y)^2 + |d|·y^2
                let r = 4 * n - dd * y * y;
                if r < 0 {
                    break;
                }
                let s = r.sqrt();
                if s * s == r && (s - y) % 2 == 0 {
                    let x = (s - y) / 2;
                    if x.abs() <= i128::from(WITNESS_COORD_BOUND) {
                        return Some(NormWitness { x: x as i64, y: y as i64, t });
                    }
                }
            } else {
                let r = n - (dd / 4) * y * y;
                if r < 0 {
                    break;
                }
                let x = r.sqrt();
                if x * x == r && x <= i128::from(WITNESS_COORD_BOUND) {
                    return Some(NormWitness { x: x as i64, y: y as i64, t });
                }
            }
        }
    }
    None
}

/// Recomputes the norm of a witness.
pub fn witness_norm(w: &NormWitness, d: i64) -> i128 {
    let (x, y) = (i128::from(w.x), i128::from(w.y));
    if d.rem_euclid(4) == 1 {
        x * x + x * y + i128::from((1 - d) / 4) * y * y
    } else {
        x * x + i128::from(-d / 4) * y * y
    }
}

/// A subgroup of `(Z/n)^2` as an explicit set of points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PointSet {
    pub level: u64,
    pub points: BTreeSet<(u64, u64)>,
}

impl PointSet {
    pub fn order(&self) -> u64 {
        self.points.len() as u64
    }
}

/// All subgroups of `(Z/n)^2`: the cyclic ones, then sums of two cyclic ones
/// (every subgroup needs at most two generators).
pub fn exhaustive_subgroups(n: u64) -> Vec<PointSet> {
    let mut cyclic: BTreeSet<BTreeSet<(u64, u64)>> = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            let span = (0..n).map(|k| ((k * x) % n, (k * y) % n)).collect();
            cyclic.insert(span);
        }
    }
    let cyclic: Vec<_> = cyclic.into_iter().collect();
    let mut all: BTreeSet<BTreeSet<(u64, u64)>> = cyclic.iter().cloned().collect();
    for (i, p) in cyclic.iter().enumerate() {
        for q in &cyclic[i + 1..] {
            let sum = p
                .iter()
                .flat_map(|&(a, b)| q.iter().map(move |&(c, e)| ((a + c) % n, (b + e) % n)))
                .collect();
            all.insert(sum);
        }
    }
    all.into_iter()
        .map(|points| PointSet { level: n, points })
        .collect()
}

/// Index in `Z^(2gn)` of the image of `m` acting on `2g` copies of `Z^n`,
/// read off a Hermite form built by Euclidean row operations.
pub fn lattice_degree_oracle(m: &IntMatrix, g: u32) -> Result<BigUint> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let copies = 2 * g as usize;
    let size = n * copies;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for k in 0..copies {
        for i in 0..n {
            for j in 0..n {
                rows[k * n + i][k * n + j] = m[(i, j)].clone();
            }
        }
    }
    let mut index = BigInt::from(1);
    for col in 0..size {
        loop {
            let pivot = (col..size)
                .filter(|&r| !rows[r][col].is_zero())
                .min_by_key(|&r| rows[r][col].abs());
            let Some(p) = pivot else {
                return Err(Error::SingularMatrix);
            };
            rows.swap(col, p);
            let mut done = true;
            let (head, tail) = rows.split_at_mut(col + 1);
            let pivot_row = &head[col];
            for row in tail {
                if row[col].is_zero() {
                    continue;
                }
                let q = row[col].div_floor(&pivot_row[col]);
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &q * p;
                }
                if !row[col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        index *= rows[col][col].abs();
    }
    Ok(index.magnitude().clone())
}
