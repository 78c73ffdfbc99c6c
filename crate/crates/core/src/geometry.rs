//! Set-level primitives on subdifferential polytopes and dual-norm balls:
//! distance, intersection with a Minkowski sum, inclusion in a Minkowski
//! sum, Hausdorff distance, and modulus supports.
//!
//! Supported primal norms are L1 and L∞, which keep every operation a
//! single LP: the dual of L1 is the L∞ box and the dual of L∞ is the L1
//! cross-polytope. Minkowski sums are never materialized; they exist only
//! as variable blocks inside feasibility LPs.

use crate::error::{Error, Result};
use crate::funcrep::{validate_modulus, MaxAffine};
use crate::lp::{self, LpBuilder};
use crate::subdiff::SubdiffPolytope;

/// Names the norm on point space; slope-space quantities use its dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

impl Norm {
    /// The norm itself, on point space.
    pub fn primal(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::Linf => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }

    /// The dual norm, on slope space.
    pub fn dual(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => Norm::Linf.primal(v),
            Norm::Linf => Norm::L1.primal(v),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::Linf => "linf",
        })
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "L1" => Ok(Norm::L1),
            "linf" | "Linf" | "LINF" => Ok(Norm::Linf),
            other => Err(Error::Input(format!("unknown norm {other:?}, expected l1 or linf"))),
        }
    }
}

/// The closed ball of radius `radius` around the origin in the dual norm
/// of `norm`. `radius = 0` is the singleton `{0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualBallSpec {
    pub radius: f64,
    pub norm: Norm,
}

impl DualBallSpec {
    pub fn new(radius: f64, norm: Norm) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Input(format!("ball radius must be finite and ≥ 0, got {radius}")));
        }
        Ok(DualBallSpec { radius, norm })
    }
}

/// A compact convex modulus set in slope space: either a dual-norm ball or
/// `∂εh(0)` of a polyhedral modulus `h` with `h(0) = 0`.
#[derive(Clone, Debug)]
pub enum ModulusSet {
    Ball(DualBallSpec),
    Polyhedral { h: MaxAffine, epsilon: f64 },
}

impl ModulusSet {
    pub fn ball(radius: f64, norm: Norm) -> Result<Self> {
        Ok(ModulusSet::Ball(DualBallSpec::new(radius, norm)?))
    }

    /// The singleton `{0}`, used for plain (sum-free) set comparisons.
    pub fn origin() -> Self {
        ModulusSet::Ball(DualBallSpec { radius: 0.0, norm: Norm::Linf })
    }

    /// `∂εh(0)` for a validated modulus `h`.
    pub fn polyhedral(h: MaxAffine, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Input(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
        }
        let h = validate_modulus(h)?;
        Ok(ModulusSet::Polyhedral { h, epsilon })
    }

    /// Appends variables `u` constrained to this set; returns their columns.
    pub(crate) fn add_block(&self, dim: usize, b: &mut LpBuilder) -> Result<std::ops::Range<usize>> {
        match self {
            ModulusSet::Ball(DualBallSpec { radius, norm: Norm::L1 }) => {
                // Dual of L1: the box ‖u‖∞ ≤ K.
                Ok(b.add_vars(dim, Some(-radius), Some(*radius)))
            }
            ModulusSet::Ball(DualBallSpec { radius, norm: Norm::Linf }) => {
                // Dual of L∞: the cross-polytope ‖u‖₁ ≤ K via split parts.
                let u = b.add_vars(dim, None, None);
                let pos = b.add_vars(dim, Some(0.0), None);
                let neg = b.add_vars(dim, Some(0.0), None);
                for k in 0..dim {
                    b.add_eq(
                        vec![(u.start + k, 1.0), (pos.start + k, -1.0), (neg.start + k, 1.0)],
                        0.0,
                    );
                }
                let mass = pos.clone().chain(neg.clone()).map(|j| (j, 1.0)).collect();
                b.add_leq(mass, *radius);
                Ok(u)
            }
            ModulusSet::Polyhedral { h, epsilon } => {
                if h.dim() != dim {
                    return Err(Error::Input(format!(
                        "modulus dimension {} does not match ambient dimension {dim}",
                        h.dim()
                    )));
                }
                let u = b.add_vars(dim, None, None);
                let mu = b.add_vars(h.num_pieces(), Some(0.0), None);
                b.add_eq(mu.clone().map(|j| (j, 1.0)).collect(), 1.0);
                // Σ μ_l b_l ≥ h(0) − ε = −ε.
                b.add_geq(
                    mu.clone()
                        .zip(h.pieces().iter().map(|p| p.intercept))
                        .collect(),
                    -epsilon,
                );
                for k in 0..dim {
                    let mut terms: Vec<(usize, f64)> = mu
                        .clone()
                        .zip(h.pieces().iter().map(|p| p.gradient[k]))
                        .collect();
                    terms.push((u.start + k, -1.0));
                    b.add_eq(terms, 0.0);
                }
                Ok(u)
            }
        }
    }

    /// Support value `max{⟨u, d⟩ : u ∈ M}`. For a ball of radius `K` this is
    /// `K · ‖d‖` in the primal norm; for `∂εh(0)` it is one LP.
    pub fn support(&self, d: &[f64]) -> Result<f64> {
        match self {
            ModulusSet::Ball(DualBallSpec { radius, norm }) => Ok(radius * norm.primal(d)),
            ModulusSet::Polyhedral { h, epsilon } => {
                if h.dim() != d.len() {
                    return Err(Error::Input(format!(
                        "direction has length {}, expected {}",
                        d.len(),
                        h.dim()
                    )));
                }
                let mut b = LpBuilder::new();
                let mu = b.add_vars(h.num_pieces(), Some(0.0), None);
                b.add_eq(mu.clone().map(|j| (j, 1.0)).collect(), 1.0);
                b.add_geq(
                    mu.clone()
                        .zip(h.pieces().iter().map(|p| p.intercept))
                        .collect(),
                    -epsilon,
                );
                for (j, p) in mu.clone().zip(h.pieces()) {
                    b.objective(j, -crate::funcrep::dot(&p.gradient, d));
                }
                let sol = lp::solve(&b.build())?;
                let (_, obj) = sol.expect_optimal("modulus support")?;
                Ok(-obj)
            }
        }
    }
}

fn check_same_dim(a: &SubdiffPolytope, b: &SubdiffPolytope) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::Input(format!(
            "ambient dimensions differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.dim())
}

/// `d(A, B) = min{‖a − b‖∗ : a ∈ A, b ∈ B}` in the dual of `norm`, exactly,
/// as one LP (box epigraph for the L∞ dual, split variables for L1).
pub fn distance(a: &SubdiffPolytope, b: &SubdiffPolytope, norm: Norm) -> Result<f64> {
    let dim = check_same_dim(a, b)?;
    let mut lp_b = LpBuilder::new();
    let la = a.add_multiplier_block(&mut lp_b);
    let lb = b.add_multiplier_block(&mut lp_b);
    match norm {
        Norm::L1 => {
            // minimize t with |residual_k| ≤ t.
            let t = lp_b.add_var(Some(0.0), None);
            lp_b.objective(t, 1.0);
            for k in 0..dim {
                let mut up: Vec<(usize, f64)> = la.clone().zip(a.image_coeffs(k)).collect();
                up.extend(lb.clone().zip(b.image_coeffs(k)).map(|(j, c)| (j, -c)));
                let mut down: Vec<(usize, f64)> =
                    up.iter().map(|&(j, c)| (j, -c)).collect();
                up.push((t, -1.0));
                down.push((t, -1.0));
                lp_b.add_leq(up, 0.0);
                lp_b.add_leq(down, 0.0);
            }
        }
        Norm::Linf => {
            // minimize Σ (p_k + q_k) with residual_k = p_k − q_k.
            let pos = lp_b.add_vars(dim, Some(0.0), None);
            let neg = lp_b.add_vars(dim, Some(0.0), None);
            for j in pos.clone().chain(neg.clone()) {
                lp_b.objective(j, 1.0);
            }
            for k in 0..dim {
                let mut terms: Vec<(usize, f64)> = la.clone().zip(a.image_coeffs(k)).collect();
                terms.extend(lb.clone().zip(b.image_coeffs(k)).map(|(j, c)| (j, -c)));
                terms.push((pos.start + k, -1.0));
                terms.push((neg.start + k, 1.0));
                lp_b.add_eq(terms, 0.0);
            }
        }
    }
    let sol = lp::solve(&lp_b.build())?;
    let (_, obj) = sol.expect_optimal("set distance")?;
    Ok(obj.max(0.0))
}

/// Whether `A ∩ (B ⊕ M)` is nonempty, as feasibility of the linking system
/// `Σ λ^A a = Σ λ^B c + u, u ∈ M`. Returns the common point on success.
pub fn intersects(
    a: &SubdiffPolytope,
    b: &SubdiffPolytope,
    m: &ModulusSet,
) -> Result<Option<Vec<f64>>> {
    let dim = check_same_dim(a, b)?;
    let mut lp_b = LpBuilder::new();
    let la = a.add_multiplier_block(&mut lp_b);
    let lb = b.add_multiplier_block(&mut lp_b);
    let u = m.add_block(dim, &mut lp_b)?;
    for k in 0..dim {
        let mut terms: Vec<(usize, f64)> = la.clone().zip(a.image_coeffs(k)).collect();
        terms.extend(lb.clone().zip(b.image_coeffs(k)).map(|(j, c)| (j, -c)));
        terms.push((u.start + k, -1.0));
        lp_b.add_eq(terms, 0.0);
    }
    match lp::solve(&lp_b.build())? {
        lp::LpSolution::Optimal { z, .. } => Ok(Some(a.map_multipliers(&z[la]))),
        lp::LpSolution::Infeasible => Ok(None),
        lp::LpSolution::Unbounded => {
            Err(Error::Numerical("intersection feasibility LP reported unbounded".into()))
        }
    }
}

/// Outcome of an inclusion test `A ⊂ B ⊕ M`.
#[derive(Clone, Debug, PartialEq)]
pub enum Inclusion {
    Included,
    /// A vertex of `A` outside `B ⊕ M`.
    Violated(Vec<f64>),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Included)
    }
}

/// Tests `A ⊂ B ⊕ M` by checking every vertex of `A` for membership in the
/// sum (one feasibility LP per vertex). The first violating vertex, in
/// enumeration order, is returned as the counterexample.
pub fn included_in_sum(
    a: &SubdiffPolytope,
    b: &SubdiffPolytope,
    m: &ModulusSet,
) -> Result<Inclusion> {
    let dim = check_same_dim(a, b)?;
    for v in a.vertices()? {
        let mut lp_b = LpBuilder::new();
        let lb = b.add_multiplier_block(&mut lp_b);
        let u = m.add_block(dim, &mut lp_b)?;
        for k in 0..dim {
            let mut terms: Vec<(usize, f64)> =
                lb.clone().zip(b.image_coeffs(k)).collect();
            terms.push((u.start + k, 1.0));
            lp_b.add_eq(terms, v[k]);
        }
        if lp::solve(&lp_b.build())?.optimal().is_none() {
            return Ok(Inclusion::Violated(v));
        }
    }
    Ok(Inclusion::Included)
}

/// Distance from a fixed slope to a subdifferential polytope, in the dual
/// of `norm`.
fn point_distance(v: &[f64], b: &SubdiffPolytope, norm: Norm) -> Result<f64> {
    let dim = b.dim();
    let mut lp_b = LpBuilder::new();
    let lb = b.add_multiplier_block(&mut lp_b);
    match norm {
        Norm::L1 => {
            let t = lp_b.add_var(Some(0.0), None);
            lp_b.objective(t, 1.0);
            for k in 0..dim {
                let mut up: Vec<(usize, f64)> =
                    lb.clone().zip(b.image_coeffs(k)).map(|(j, c)| (j, -c)).collect();
                let mut down: Vec<(usize, f64)> = up.iter().map(|&(j, c)| (j, -c)).collect();
                up.push((t, -1.0));
                down.push((t, -1.0));
                lp_b.add_leq(up, -v[k]);
                lp_b.add_leq(down, v[k]);
            }
        }
        Norm::Linf => {
            let pos = lp_b.add_vars(dim, Some(0.0), None);
            let neg = lp_b.add_vars(dim, Some(0.0), None);
            for j in pos.clone().chain(neg.clone()) {
                lp_b.objective(j, 1.0);
            }
            for k in 0..dim {
                let mut terms: Vec<(usize, f64)> =
                    lb.clone().zip(b.image_coeffs(k)).map(|(j, c)| (j, -c)).collect();
                terms.push((pos.start + k, -1.0));
                terms.push((neg.start + k, 1.0));
                lp_b.add_eq(terms, -v[k]);
            }
        }
    }
    let sol = lp::solve(&lp_b.build())?;
    let (_, obj) = sol.expect_optimal("point-to-set distance")?;
    Ok(obj.max(0.0))
}

/// Hausdorff distance between two subdifferential polytopes in the dual of
/// `norm`. The supremum side is exact: a convex function attains its
/// maximum over a polytope at a vertex, so it is evaluated on vertex lists.
pub fn hausdorff(a: &SubdiffPolytope, b: &SubdiffPolytope, norm: Norm) -> Result<f64> {
    check_same_dim(a, b)?;
    let mut h = 0.0f64;
    for v in a.vertices()? {
        h = h.max(point_distance(&v, b, norm)?);
    }
    for v in b.vertices()? {
        h = h.max(point_distance(&v, a, norm)?);
    }
    Ok(h)
}
