//! Integer factorization and the multiplicative group of positive rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const TRIAL_LIMIT: u64 = 1 << 12;

/// Deterministic Miller–Rabin. Exact below 3.3e24; beyond that the fixed
/// witness set makes it a strong probable-prime test.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if SMALL_PRIMES.iter().any(|&p| (n % p).is_zero()) {
        return false;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES[..12] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Brent's variant of Pollard rho; `n` must be an odd composite.
fn rho_u64(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn split_into(n: BigUint, out: &mut BTreeMap<BigUint, i64>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = match n.to_u64() {
        Some(small) => BigUint::from(rho_u64(small)),
        None => rho_big(&n),
    };
    let rest = &n / &d;
    split_into(d, out);
    split_into(rest, out);
}

/// Factors a positive integer into primes. `n = 0` yields the empty map.
pub fn factor(n: &BigUint) -> FactoredRational {
    let mut exps = BTreeMap::new();
    if n.is_zero() {
        return FactoredRational { exps };
    }
    let mut rest = n.clone();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        if (&rest % p).is_zero() {
            let mut e = 0;
            while (&rest % p).is_zero() {
                rest /= p;
                e += 1;
            }
            exps.insert(BigUint::from(p), e);
        }
        if BigUint::from(p * p) > rest {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        if BigUint::from(p * p) > rest {
            *exps.entry(rest).or_insert(0) += 1;
        } else {
            split_into(rest, &mut exps);
        }
    }
    FactoredRational { exps }
}

pub fn factor_u64(n: u64) -> FactoredRational {
    factor(&BigUint::from(n))
}

/// A positive rational number stored as its prime factorization.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactoredRational {
    exps: BTreeMap<BigUint, i64>,
}

impl FactoredRational {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_integer(n: &BigUint) -> Self {
        assert!(!n.is_zero(), "zero has no factorization");
        factor(n)
    }

    pub fn from_u64(n: u64) -> Self {
        Self::from_integer(&BigUint::from(n))
    }

    /// `num / den`, both positive.
    pub fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        Self::from_integer(num).mul(&Self::from_integer(den).inv())
    }

    /// Builds from explicit prime powers; exponents of repeated primes add up
    /// and zero exponents are dropped. Keys are not re-checked for primality.
    pub fn from_prime_powers<I>(powers: I) -> Self
    where
        I: IntoIterator<Item = (BigUint, i64)>,
    {
        let mut exps = BTreeMap::new();
        for (p, e) in powers {
            *exps.entry(p).or_insert(0) += e;
        }
        exps.retain(|_, e| *e != 0);
        Self { exps }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &BTreeMap<BigUint, i64> {
        &self.exps
    }

    pub fn exponent(&self, p: &BigUint) -> i64 {
        self.exps.get(p).copied().unwrap_or(0)
    }

    pub fn is_integer(&self) -> bool {
        self.exps.values().all(|&e| e > 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exps = self.exps.clone();
        for (p, e) in &other.exps {
            let slot = exps.entry(p.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                exps.remove(p);
            }
        }
        Self { exps }
    }

    pub fn inv(&self) -> Self {
        Self {
            exps: self.exps.iter().map(|(p, e)| (p.clone(), -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self {
            exps: self.exps.iter().map(|(p, e)| (p.clone(), e * k)).collect(),
        }
    }

    pub fn numerator(&self) -> BigUint {
        self.part(|e| e > 0)
    }

    pub fn denominator(&self) -> BigUint {
        self.part(|e| e < 0)
    }

    fn part(&self, keep: impl Fn(i64) -> bool) -> BigUint {
        self.exps
            .iter()
            .filter(|(_, &e)| keep(e))
            .fold(BigUint::one(), |acc, (p, &e)| {
                acc * p.pow(e.unsigned_abs() as u32)
            })
    }

    /// Removes the prime `p`, returning the remaining factor.
    pub fn without(&self, p: &BigUint) -> Self {
        let mut exps = self.exps.clone();
        exps.remove(p);
        Self { exps }
    }

    pub fn divisible_by_prime(&self, p: &BigUint) -> bool {
        self.exps.contains_key(p)
    }

    /// Primes whose exponent is odd; the class in Q+/Q+^2.
    pub fn odd_primes(&self) -> impl Iterator<Item = &BigUint> {
        self.exps
            .iter()
            .filter(|(_, e)| e.rem_euclid(2) == 1)
            .map(|(p, _)| p)
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.denominator();
        if den.is_one() {
            write!(f, "{}", self.numerator())
        } else {
            write!(f, "{}/{}", self.numerator(), den)
        }
    }
}

/// Square root of `a` modulo an odd prime `p`, if one exists (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: &BigInt, p: &BigUint) -> Option<BigUint> {
    let a = {
        let pi = BigInt::from(p.clone());
        a.mod_floor(&pi).to_biguint().unwrap()
    };
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    let one = BigUint::one();
    let p_minus_one = p - &one;
    let half = &p_minus_one >> 1u32;
    if a.modpow(&half, p) != one {
        return None;
    }
    let s = p_minus_one.trailing_zeros().unwrap_or(0);
    let q = &p_minus_one >> s;
    let mut z = BigUint::from(2u32);
    while z.modpow(&half, p) == one {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1u32), p);
    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Kronecker symbol (a | n) for arbitrary integers.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.magnitude().is_one() { 1 } else { 0 };
    }
    let mut a = a.clone();
    let mut n = n.clone();
    let mut result = 1;
    if n.sign() == Sign::Minus {
        n = -n;
        if a.sign() == Sign::Minus {
            result = -result;
        }
    }
    let twos = n.trailing_zeros().unwrap_or(0);
    if twos > 0 {
        if a.is_even() {
            return 0;
        }
        let r8 = a.mod_floor(&BigInt::from(8)).to_u8().unwrap();
        if twos % 2 == 1 && (r8 == 3 || r8 == 5) {
            result = -result;
        }
        n >>= twos;
    }
    // n is now odd and positive: Jacobi symbol
    a = a.mod_floor(&n);
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n8 = (&n % 8u32).to_u8().unwrap();
        if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
            result = -result;
        }
        if (&a % 4u32).to_u8() == Some(3) && n8 % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}
