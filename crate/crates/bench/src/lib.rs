//! Inputs shared by the benchmarks.

use k0_core::arith::TorsionSubgroup;
use k0_core::IntMatrix;
use num_bigint::BigInt;

/// Fundamental discriminants of increasing size.
pub const DISCRIMINANTS: [i64; 4] = [-84, -1_003, -10_007, -100_004];

/// A deterministic nonsingular `n x n` matrix with moderately sized entries.
pub fn sample_matrix(n: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = ((i * 7 + j * 13 + i * j * 3) % 23) as i64 - 11;
            m[(i, j)] = BigInt::from(if i == j { v + 40 } else { v });
        }
    }
    m
}

/// The two coordinate axes of `E[n]`, a pair of cyclic subgroups of order `n`.
pub fn axis_pair(n: u64) -> (TorsionSubgroup, TorsionSubgroup) {
    (
        TorsionSubgroup::generated_by(n, &[(1, 0)]),
        TorsionSubgroup::generated_by(n, &[(0, 1)]),
    )
}
