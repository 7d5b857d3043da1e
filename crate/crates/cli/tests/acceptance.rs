//! Acceptance criteria, run in sequence with their time bounds.
//!
//! Each criterion prints one `PASS`/`FAIL` line; the process exits nonzero if
//! any criterion fails or overruns its bound.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use k0_cli::{execute, Command};
use k0_core::arith::{is_prime_u64, matrix_isogeny_degree, TorsionSubgroup};
use k0_core::k0::{k0_add, k0_dual, k0_of_object, k0_scale, validate_derivation, Degree, Deriver, Step};
use k0_core::kernels::{kernel_of_matrix_endo, tot_class, tot_in_image};
use k0_core::oracle::{
    enumerate_reduced_forms, in_principal_genus, is_fundamental_naive, lattice_degree_oracle,
    norm_witness_search, prime_form_oracle, witness_norm,
};
use k0_core::quadforms::{class_group, is_fundamental};
use k0_core::{FactoredRational, GClass, IntMatrix, IsogenyContext, KernelMultiset};
use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Id, description, time bound in seconds, check.
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: u64) -> FactoredRational {
    FactoredRational::from_u64(n)
}

fn primes_below(n: u64) -> impl Iterator<Item = u64> {
    (2..n).filter(|&l| is_prime_u64(l))
}

fn write_ctx(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).expect("temp file");
    path
}

fn eval_code(ctx: &std::path::Path, lhs: String, rhs: String) -> Result<i32, String> {
    execute(&Command::Eval {
        ctx: ctx.to_path_buf(),
        expr: lhs,
        equals: Some(rhs),
    })
    .map(|r| r.code)
    .map_err(|e| e.to_string())
}

/// EndZ(2): every prime has order 4, its dual is the cube, and `eval` sees
/// [A_l] != dual([A_l]) but [A_l] + dual([A_l]) = 2[A].
fn c1_surface() -> Outcome {
    let ctx = IsogenyContext::end_z(2).unwrap();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = write_ctx(&dir, "ctx.toml", "case = \"end_z\"\ng = 2\n");
    let mut count = 0;
    for l in primes_below(101) {
        let x = ctx.dist_class(&q(l)).unwrap();
        for k in 1..=4 {
            let trivial = ctx.g_pow(&x, &BigInt::from(k)).unwrap().is_identity();
            ensure(trivial == (k == 4), || format!("l = {l}: x^{k} trivial = {trivial}"))?;
        }
        let dual = ctx.g_dual(&x).unwrap();
        ensure(dual == ctx.dist_class(&q(l * l * l)).unwrap(), || format!("l = {l}: dual is not l^3"))?;
        ensure(dual != x, || format!("l = {l}: dual equals l"))?;
        let code = eval_code(&file, format!("[1; {l}]"), format!("dual([1; {l}])"))?;
        ensure(code == 1, || format!("l = {l}: eval says [A_l] = dual([A_l])"))?;
        let code = eval_code(&file, format!("[1; {l}] + dual([1; {l}])"), "2*[1; 1]".into())?;
        ensure(code == 0, || format!("l = {l}: [A_l] + dual != 2[A]"))?;
        count += 1;
    }
    // and once through the installed binary
    let out = Process::new(env!("CARGO_BIN_EXE_k0"))
        .args(["eval", "--ctx"])
        .arg(&file)
        .args(["[1; 2]", "--equals", "dual([1; 2])"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), || format!("binary exit {:?}", out.status.code()))?;
    Ok(format!("{count} primes"))
}

/// Class groups against the naive enumeration for |d| <= 10^4, and the group
/// axioms exhaustively for |d| <= 500.
fn c2_class_groups() -> Outcome {
    let mut discs = 0;
    for d in (3..=10_000i64).map(|d| -d) {
        let fundamental = is_fundamental_naive(d);
        ensure(is_fundamental(&BigInt::from(d)) == fundamental, || format!("fundamental test at {d}"))?;
        if !fundamental {
            continue;
        }
        let cg = class_group(&BigInt::from(d)).map_err(|e| e.to_string())?;
        ensure(cg.elements() == enumerate_reduced_forms(d).as_slice(), || format!("d = {d}"))?;
        discs += 1;
    }
    let mut axioms = 0;
    for d in (3..=500i64).map(|d| -d).filter(|&d| is_fundamental_naive(d)) {
        let cg = class_group(&BigInt::from(d)).unwrap();
        let elems = cg.elements();
        let id = cg.identity();
        let set: BTreeSet<_> = elems.iter().cloned().collect();
        let table: Vec<Vec<usize>> = elems
            .iter()
            .map(|x| {
                elems
                    .iter()
                    .map(|y| elems.binary_search(&x.compose(y).unwrap()).unwrap())
                    .collect()
            })
            .collect();
        for (i, x) in elems.iter().enumerate() {
            ensure(x.compose(&id).unwrap() == *x, || format!("d = {d}: identity fails at {x}"))?;
            let inv = x.inverse().reduce().unwrap();
            ensure(set.contains(&inv), || format!("d = {d}: inverse of {x} not reduced form"))?;
            ensure(x.compose(&inv).unwrap() == id, || format!("d = {d}: {x} times inverse"))?;
            for j in 0..elems.len() {
                ensure(table[i][j] == table[j][i], || format!("d = {d}: not commutative"))?;
                for k in 0..elems.len() {
                    ensure(table[table[i][j]][k] == table[i][table[j][k]], || {
                        format!("d = {d}: associativity at ({i}, {j}, {k})")
                    })?;
                }
            }
        }
        axioms += 1;
    }
    Ok(format!("{discs} discriminants matched, axioms on {axioms}"))
}

/// is_norm against witnesses and independently enumerated squares.
fn c3_norms() -> Outcome {
    let mut checked = 0;
    for d in [-4i64, -8, -20, -23, -47] {
        let ctx = IsogenyContext::cm(d).unwrap();
        for l in primes_below(500) {
            let main = ctx.is_norm(&q(l)).unwrap();
            let witness = norm_witness_search(l, 1, d, 50);
            match (main, witness) {
                (true, None) => return Err(format!("d = {d}, l = {l}: norm without witness")),
                (true, Some(w)) => {
                    ensure(witness_norm(&w, d) == i128::from(l * w.t * w.t), || format!("bad witness {w:?}"))?;
                }
                (false, Some(w)) => return Err(format!("d = {d}, l = {l}: witness {w:?} for a non-norm")),
                (false, None) => {
                    let outside = prime_form_oracle(l, d).is_none_or(|f| !in_principal_genus(&f));
                    ensure(outside, || format!("d = {d}, l = {l}: class is a square but not a norm"))?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} primes, 0 disagreements"))
}

/// Supersingular: classes of equal multiplicity always agree.
fn c4_supersingular() -> Outcome {
    let mut compared = 0;
    for p in [2u64, 3, 7, 101] {
        let ctx = IsogenyContext::supersingular(p).unwrap();
        for n in 1..=3u32 {
            let n = BigUint::from(n);
            let base = k0_of_object(&ctx, &n, &Degree::Rational(FactoredRational::one())).unwrap();
            for a in 1..=30u64 {
                for b in 1..=30u64 {
                    let qab = FactoredRational::from_ratio(&BigUint::from(a), &BigUint::from(b));
                    let x = k0_of_object(&ctx, &n, &Degree::Rational(qab)).unwrap();
                    ensure(x == base, || format!("p = {p}: {a}/{b} differs"))?;
                    compared += 1;
                }
            }
            let k = KernelMultiset::new(BigUint::from(p), 2, 0, 3, FactoredRational::one()).unwrap();
            let x = k0_of_object(&ctx, &n, &Degree::Kernel(k)).unwrap();
            ensure(x == base, || format!("p = {p}: kernel class differs"))?;
        }
    }
    Ok(format!("{compared} comparisons"))
}

fn squarefree(n: u64) -> bool {
    (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k * k))
}

/// Frobenius has infinite order, matrix kernels are balanced, and the image of
/// tot has index exactly 2.
fn c5_char_p() -> Outcome {
    let p = 5u64;
    let ctx = IsogenyContext::char_p_end_z(p).unwrap();
    let frob = tot_class(&ctx, &KernelMultiset::frobenius_ordinary(BigUint::from(p))).unwrap();
    let expected = GClass::CharP {
        p: BigUint::from(p),
        a: BigInt::from(-1),
        odd_primes: BTreeSet::new(),
    };
    ensure(frob == expected, || format!("tot(Frob) = {frob}"))?;
    for k in 1..=100 {
        ensure(!ctx.g_pow(&frob, &BigInt::from(k)).unwrap().is_identity(), || format!("{k}·Frob = 0"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut matrices = 0;
    while matrices < 500 {
        let n = rng.gen_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-25..=25)).collect()).collect();
        let m = IntMatrix::from_rows(rows);
        if m.det().unwrap() == BigInt::from(0) {
            continue;
        }
        let k = kernel_of_matrix_endo(&m, &ctx).map_err(|e| e.to_string())?;
        ensure(k.deg_p() == BigInt::from(0), || format!("deg_p = {} for {m}", k.deg_p()))?;
        matrices += 1;
    }

    // grid of (a, q), q squarefree <= 100
    let pb = BigUint::from(p);
    let grid: Vec<(i64, FactoredRational)> = (-10i64..=10)
        .flat_map(|a| (1..=100u64).filter(|&n| squarefree(n)).map(move |n| (a, q(n))))
        .collect();
    let inside = |(a, x): &(i64, FactoredRational)| tot_in_image(&pb, &BigInt::from(*a), x);
    let times = |(a, x): &(i64, FactoredRational), (b, y): &(i64, FactoredRational)| (a + b, x.mul(y));
    let mut passing = 0;
    for e in &grid {
        let shifted = (e.0, e.1.mul(&q(p)));
        ensure(inside(e) != inside(&shifted), || format!("({}, {}) and its p-multiple agree", e.0, e.1))?;
        passing += usize::from(inside(e));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..5000 {
        let (x, y) = (grid.choose(&mut rng).unwrap(), grid.choose(&mut rng).unwrap());
        let product = times(x, y);
        if inside(x) && inside(y) {
            ensure(inside(&product), || "image not closed under products".into())?;
        }
        if !inside(x) && !inside(y) {
            ensure(inside(&product), || "two non-image elements multiply outside the image".into())?;
        }
        if inside(x) != inside(y) {
            ensure(!inside(&product), || "coset of the image not stable".into())?;
        }
    }
    Ok(format!(
        "Frobenius non-torsion to 100, {matrices} matrices, {passing}/{} grid points in image",
        grid.len()
    ))
}

fn corruptions(d: &k0_core::Derivation) -> Vec<k0_core::Derivation> {
    let mut out = Vec::new();
    let mut empty = d.clone();
    empty.steps.clear();
    out.push(empty);
    let mut flipped = d.clone();
    if let Some(Step::Key { sign, .. }) = flipped.steps.iter_mut().find(|s| matches!(s, Step::Key { .. })) {
        *sign = -*sign;
    }
    out.push(flipped);
    let mut dropped = d.clone();
    if let Some(i) = dropped.steps.iter().position(|s| matches!(s, Step::Key { .. })) {
        dropped.steps.remove(i);
    }
    out.push(dropped);
    let mut retargeted = d.clone();
    retargeted.to = retargeted.from;
    out.push(retargeted);
    out
}

/// Derivations for every pair up to order 12 and 200 sampled pairs per order
/// up to 30; corrupted certificates are rejected.
fn c6_derivations() -> Outcome {
    let mut total = 0;
    let mut rejected = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 1..=30u64 {
        let deriver = Deriver::new(n);
        let subs: Vec<TorsionSubgroup> = deriver.subgroups().iter().copied().filter(|s| s.order() == n).collect();
        let pairs: Vec<(TorsionSubgroup, TorsionSubgroup)> = if n <= 12 {
            subs.iter().flat_map(|a| subs.iter().map(move |b| (*a, *b))).collect()
        } else {
            (0..200)
                .map(|_| (*subs.choose(&mut rng).unwrap(), *subs.choose(&mut rng).unwrap()))
                .collect()
        };
        for (c1, c2) in pairs {
            let d = deriver.derive(&c1, &c2).map_err(|e| format!("n = {n}: {e}"))?;
            let v = validate_derivation(&d);
            ensure(v.ok, || format!("n = {n}: {c1} ~ {c2} rejected: {:?}", v.trace.last()))?;
            total += 1;
            if c1 != c2 {
                for bad in corruptions(&d) {
                    ensure(!validate_derivation(&bad).ok, || format!("n = {n}: corrupted certificate accepted"))?;
                    rejected += 1;
                }
            }
        }
    }
    Ok(format!("{total} derivations validated, {rejected} corruptions rejected"))
}

fn random_ratio(rng: &mut ChaCha8Rng) -> FactoredRational {
    let a: u64 = rng.gen_range(1..1_000_000);
    let b: u64 = rng.gen_range(1..10_000);
    FactoredRational::from_ratio(&BigUint::from(a), &BigUint::from(b))
}

/// Homomorphism and duality properties, 1000 random cases each.
fn c7_properties() -> Outcome {
    let contexts = [
        IsogenyContext::end_z(1).unwrap(),
        IsogenyContext::end_z(2).unwrap(),
        IsogenyContext::end_z(3).unwrap(),
        IsogenyContext::cm(-20).unwrap(),
        IsogenyContext::cm(-23).unwrap(),
        IsogenyContext::cm(-84).unwrap(),
        IsogenyContext::supersingular(7).unwrap(),
        IsogenyContext::ordinary_cm(-20, 29).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let one = BigUint::from(1u32);
    for ctx in &contexts {
        for _ in 0..1000 {
            let (x, y) = (random_ratio(&mut rng), random_ratio(&mut rng));
            let gx = ctx.dist_class(&x).unwrap();
            let gy = ctx.dist_class(&y).unwrap();
            let lhs = ctx.dist_class(&x.mul(&y)).unwrap();
            ensure(lhs == ctx.g_mul(&gx, &gy).unwrap(), || format!("{ctx}: dist({x}·{y})"))?;

            let dx = ctx.g_dual(&gx).unwrap();
            ensure(ctx.g_dual(&dx).unwrap() == gx, || format!("{ctx}: dual not involutive at {x}"))?;
            ensure(ctx.g_mul(&gx, &dx).unwrap().is_identity(), || format!("{ctx}: dual not inverse at {x}"))?;

            if ctx.characteristic().is_none() {
                let n = q(rng.gen_range(1..100_000));
                let m = q(rng.gen_range(1..100_000));
                let obj = |r: FactoredRational| k0_of_object(ctx, &one, &Degree::Rational(r)).unwrap();
                let lhs = k0_add(ctx, &obj(n.mul(&m)), &obj(FactoredRational::one())).unwrap();
                let rhs = k0_add(ctx, &obj(n), &obj(m)).unwrap();
                ensure(lhs == rhs, || format!("{ctx}: decomposition fails"))?;
            }

            let a = k0_of_object(ctx, &one, &Degree::Rational(x.clone())).unwrap();
            let canon = k0_add(ctx, &a, &k0_dual(ctx, &a).unwrap()).unwrap();
            let two_a = k0_scale(ctx, &k0_of_object(ctx, &one, &Degree::Rational(FactoredRational::one())).unwrap(), &BigInt::from(2)).unwrap();
            ensure(canon == two_a, || format!("{ctx}: [B] + dual[B] != 2[A]"))?;
        }
    }
    let mut ends = 0;
    while ends < 1000 {
        let n = rng.gen_range(1..=3usize);
        let g = rng.gen_range(1..=3u32);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-12..=12)).collect()).collect();
        let m = IntMatrix::from_rows(rows);
        let Ok(deg) = matrix_isogeny_degree(&m, g) else { continue };
        let ctx = IsogenyContext::end_z(g).unwrap();
        ensure(ctx.dist_class(&deg).unwrap().is_identity(), || format!("deg of {m} not trivial"))?;
        let index = lattice_degree_oracle(&m, g).map_err(|e| e.to_string())?;
        ensure(deg.numerator() == index && deg.is_integer(), || format!("deg of {m} != lattice index"))?;
        ends += 1;
    }
    Ok(format!("{} contexts x 1000 cases, {ends} matrices", contexts.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("C1", "surface duality in EndZ(2)", 1, c1_surface),
        ("C2", "class groups vs enumeration", 10, c2_class_groups),
        ("C3", "norms vs witnesses", 30, c3_norms),
        ("C4", "supersingular G(A) = 0", 1, c4_supersingular),
        ("C5", "char p: Frobenius, kernels, index 2", 5, c5_char_p),
        ("C6", "same-degree derivations", 60, c6_derivations),
        ("C7", "homomorphism and duality suite", 10, c7_properties),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut stdout = std::io::stdout().lock();
    for (id, name, bound, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(bound);
        let line = match (&outcome, in_time) {
            (Ok(detail), true) => format!("PASS {id} {name}: {detail} [{:.2?} <= {bound}s]", elapsed),
            (Ok(detail), false) => format!("FAIL {id} {name}: {detail} but took {:.2?} > {bound}s", elapsed),
            (Err(why), _) => format!("FAIL {id} {name}: {why} [{:.2?}]", elapsed),
        };
        if outcome.is_err() || !in_time {
            failed += 1;
        }
        writeln!(stdout, "{line}").unwrap();
    }
    writeln!(stdout, "{} criteria failed", failed).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
