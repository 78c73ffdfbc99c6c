//! Helpers shared by the integration suites: the fixed instance family,
//! seeded sampling, and the weak-duality problem generator.

#![allow(dead_code)]

use dccert_core::lp::LpProblem;
use dccert_core::{random_instance, Lcg64, MaxAffine, PointSet};

/// The fixed acceptance family: 50 seeded instances cycling through
/// dimensions 1–3 with 2–6 pieces per function, coefficient range 2.
pub fn instance_family() -> Vec<(MaxAffine, MaxAffine)> {
    (0..50u64)
        .map(|k| {
            let dim = 1 + (k as usize) % 3;
            let nf = 2 + (k as usize) % 5;
            let ng = 2 + ((k as usize) / 3) % 5;
            random_instance(dim, nf, ng, 2.0, 1000 + k).expect("parameters are in range")
        })
        .collect()
}

/// `per_dim` points per axis over `[-2, 2]^dim`.
pub fn lattice(dim: usize, per_dim: usize) -> PointSet {
    PointSet::lattice(dim, -2.0, 2.0, per_dim).unwrap()
}

pub fn sample_point(rng: &mut Lcg64, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.uniform(lo, hi)).collect()
}

/// A feasible bounded primal `min c·z  s.t.  G z ≤ g, 0 ≤ z ≤ u` together
/// with the data needed to pose its dual. Feasibility is built in: `g` is
/// `G z₀ + slack` for an interior `z₀`.
pub struct BoxedPrimal {
    pub num_vars: usize,
    pub c: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxedPrimal {
    pub fn random(rng: &mut Lcg64) -> Self {
        let n = 2 + (rng.next_u64() % 5) as usize;
        let m = 1 + (rng.next_u64() % 6) as usize;
        let c: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let upper: Vec<f64> = (0..n).map(|_| rng.uniform(1.0, 3.0)).collect();
        let z0: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 1.0)).collect();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for _ in 0..m {
            let row: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let b = row.iter().zip(&z0).map(|(a, z)| a * z).sum::<f64>() + rng.uniform(0.0, 2.0);
            rows.push(row);
            rhs.push(b);
        }
        BoxedPrimal { num_vars: n, c, rows, rhs, upper }
    }

    pub fn primal(&self) -> LpProblem {
        let mut p = LpProblem::new(self.num_vars);
        p.objective = self.c.clone();
        p.ineq_lhs = self.rows.clone();
        p.ineq_rhs = self.rhs.clone();
        p.lower = vec![Some(0.0); self.num_vars];
        p.upper = self.upper.iter().map(|&u| Some(u)).collect();
        p
    }

    /// The LP whose optimum is the negated dual optimum:
    /// `min g·y + u·w  s.t.  −Gᵀy − w ≤ c,  y ≥ 0, w ≥ 0`.
    pub fn dual_as_min(&self) -> LpProblem {
        let (n, m) = (self.num_vars, self.rows.len());
        let mut p = LpProblem::new(m + n);
        for i in 0..m {
            p.objective[i] = self.rhs[i];
        }
        for j in 0..n {
            p.objective[m + j] = self.upper[j];
        }
        for j in 0..n {
            let mut row = vec![0.0; m + n];
            for i in 0..m {
                row[i] = -self.rows[i][j];
            }
            row[m + j] = -1.0;
            p.ineq_lhs.push(row);
            p.ineq_rhs.push(self.c[j]);
        }
        p.lower = vec![Some(0.0); m + n];
        p
    }

    /// Max violation of dual feasibility `c + Gᵀy + w ≥ 0`, `y, w ≥ 0`.
    pub fn dual_infeasibility(&self, yw: &[f64]) -> f64 {
        let (n, m) = (self.num_vars, self.rows.len());
        let mut worst = 0.0f64;
        for v in yw {
            worst = worst.max(-v);
        }
        for j in 0..n {
            let mut lhs = self.c[j] + yw[m + j];
            for i in 0..m {
                lhs += self.rows[i][j] * yw[i];
            }
            worst = worst.max(-lhs);
        }
        worst
    }

    /// Dual objective value `−g·y − u·w` for a dual-feasible point.
    pub fn dual_value(&self, yw: &[f64]) -> f64 {
        let (n, m) = (self.num_vars, self.rows.len());
        let mut v = 0.0;
        for i in 0..m {
            v -= self.rhs[i] * yw[i];
        }
        for j in 0..n {
            v -= self.upper[j] * yw[m + j];
        }
        v
    }
}
