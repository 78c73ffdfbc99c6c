//! Shared fixtures for the kernel benchmarks.

use dccert_core::lp::{LpBuilder, LpProblem};
use dccert_core::{random_instance, Lcg64, MaxAffine};

/// A dense feasible bounded LP with `n` variables and `m` inequality rows.
pub fn dense_lp(n: usize, m: usize, seed: u64) -> LpProblem {
    let mut rng = Lcg64::new(seed);
    let mut b = LpBuilder::new();
    let vars = b.add_vars(n, Some(0.0), Some(3.0));
    for j in vars.clone() {
        b.objective(j, rng.uniform(-2.0, 2.0));
    }
    for _ in 0..m {
        let row: Vec<(usize, f64)> =
            vars.clone().map(|j| (j, rng.uniform(-2.0, 2.0))).collect();
        let slack = rng.uniform(0.5, 2.5);
        let rhs = row.iter().map(|(_, c)| c * 0.5).sum::<f64>() + slack;
        b.add_leq(row, rhs);
    }
    b.build()
}

/// A reproducible instance pair for the geometric benchmarks.
pub fn bench_pair(dim: usize, pieces: usize, seed: u64) -> (MaxAffine, MaxAffine) {
    random_instance(dim, pieces, pieces, 2.0, seed).expect("parameters in range")
}
