//! Exact representation and querying of ε-subdifferentials of max-affine
//! functions.
//!
//! For `f(x) = max_i (⟨a_i, x⟩ + b_i)` a slope `s` belongs to `∂εf(x)` iff
//! `s = Σ λ_i a_i` for multipliers `λ` in the unit simplex satisfying
//! `Σ λ_i (⟨a_i, x⟩ + b_i) ≥ f(x) − ε`. [`SubdiffPolytope`] keeps that
//! multiplier system implicit and answers every query (support value,
//! membership, vertex list) through the LP kernel; nothing is ever expanded
//! to a halfspace description. `ε = 0` is allowed everywhere and yields the
//! exact subdifferential.

use crate::error::{Error, Result};
use crate::funcrep::{dot, MaxAffine};
use crate::lp::{self, LpBuilder};

/// Piece-count cap for vertex enumeration: candidates grow as m(m−1)/2 and
/// each one costs a membership LP.
pub const VERTEX_PIECE_LIMIT: usize = 64;

/// Pairwise tolerance for deduplicating enumerated vertices.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;

/// The set `∂εf(x)` of a max-affine `f`, as the image of the multiplier
/// polytope `{λ ≥ 0, Σλ = 1, Σ λ_i (⟨a_i,x⟩+b_i) ≥ f(x) − ε}` under
/// `λ ↦ Σ λ_i a_i`. Nonempty for every `ε ≥ 0`, and monotone in `ε`.
#[derive(Clone, Debug)]
pub struct SubdiffPolytope {
    source: MaxAffine,
    point: Vec<f64>,
    epsilon: f64,
    piece_values: Vec<f64>,
    value: f64,
}

/// Builds `∂εf(x)`.
pub fn eps_subdiff(f: &MaxAffine, x: &[f64], epsilon: f64) -> Result<SubdiffPolytope> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Input(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
    }
    let piece_values = f.piece_values(x)?;
    let value = piece_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SubdiffPolytope {
        source: f.clone(),
        point: x.to_vec(),
        epsilon,
        piece_values,
        value,
    })
}

/// Builds the Fenchel subdifferential `∂f(x)`, i.e. `∂εf(x)` at `ε = 0`:
/// the convex hull of the active-piece gradients.
pub fn exact_subdiff(f: &MaxAffine, x: &[f64]) -> Result<SubdiffPolytope> {
    eps_subdiff(f, x, 0.0)
}

impl SubdiffPolytope {
    pub fn source(&self) -> &MaxAffine {
        &self.source
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn num_pieces(&self) -> usize {
        self.piece_values.len()
    }

    /// `f(x)` at the anchoring point.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Right-hand side of the multiplier cut, `f(x) − ε`.
    pub fn cut_threshold(&self) -> f64 {
        self.value - self.epsilon
    }

    /// Appends this polytope's multiplier block to an LP under construction:
    /// fresh variables `λ ≥ 0` with `Σλ = 1` and `Σ λ_i c_i ≥ f(x) − ε`.
    /// Returns the λ column range.
    pub(crate) fn add_multiplier_block(&self, lp: &mut LpBuilder) -> std::ops::Range<usize> {
        let m = self.num_pieces();
        let vars = lp.add_vars(m, Some(0.0), None);
        lp.add_eq(vars.clone().map(|j| (j, 1.0)).collect(), 1.0);
        lp.add_geq(
            vars.clone().zip(self.piece_values.iter().copied()).collect(),
            self.cut_threshold(),
        );
        vars
    }

    /// Coefficient of coordinate `k` of the image map: the vector
    /// `(a_i)_k` over pieces `i`, aligned with the multiplier block.
    pub(crate) fn image_coeffs(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.source.pieces().iter().map(move |p| p.gradient[k])
    }

    /// `Σ λ_i a_i` for a concrete multiplier vector.
    pub(crate) fn map_multipliers(&self, lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (l, p) in lambda.iter().zip(self.source.pieces()) {
            for (o, g) in out.iter_mut().zip(&p.gradient) {
                *o += l * g;
            }
        }
        out
    }

    /// Support value `max{⟨s, d⟩ : s ∈ ∂εf(x)}`, by one LP over the
    /// multiplier polytope.
    pub fn support(&self, d: &[f64]) -> Result<f64> {
        if d.len() != self.dim() {
            return Err(Error::Input(format!(
                "direction has length {}, expected {}",
                d.len(),
                self.dim()
            )));
        }
        let mut b = LpBuilder::new();
        let vars = self.add_multiplier_block(&mut b);
        for (j, p) in vars.clone().zip(self.source.pieces()) {
            b.objective(j, -dot(&p.gradient, d));
        }
        let sol = lp::solve(&b.build())?;
        let (_, obj) = sol.expect_optimal("subdifferential support")?;
        Ok(-obj)
    }

    /// Membership of `s`, as feasibility of `Σ λ_i a_i = s` over the
    /// multiplier polytope with coordinatewise equality tolerance `tol`
    /// (the LP minimizes the L∞ residual and compares it to `tol`).
    pub fn contains(&self, s: &[f64], tol: f64) -> Result<bool> {
        if s.len() != self.dim() {
            return Err(Error::Input(format!(
                "point has length {}, expected {}",
                s.len(),
                self.dim()
            )));
        }
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::Input(format!("membership tolerance must be ≥ 0, got {tol}")));
        }
        let mut b = LpBuilder::new();
        let vars = self.add_multiplier_block(&mut b);
        let t = b.add_var(Some(0.0), None);
        b.objective(t, 1.0);
        for k in 0..self.dim() {
            let base: Vec<(usize, f64)> = vars.clone().zip(self.image_coeffs(k)).collect();
            let mut up = base.clone();
            up.push((t, -1.0));
            b.add_leq(up, s[k]);
            let mut down: Vec<(usize, f64)> = base.into_iter().map(|(j, c)| (j, -c)).collect();
            down.push((t, -1.0));
            b.add_leq(down, -s[k]);
        }
        let sol = lp::solve(&b.build())?;
        let (_, residual) = sol.expect_optimal("subdifferential membership")?;
        Ok(residual <= tol)
    }

    /// The vertex list of the represented set, free of non-vertex points.
    ///
    /// Candidates are the multiplier-polytope vertices (simplex corners
    /// satisfying the cut, plus cut/edge crossings) mapped through
    /// `λ ↦ Σ λ_i a_i`; duplicates are merged at [`VERTEX_DEDUP_TOL`] and
    /// points inside the hull of the others are discarded (one membership
    /// LP each). Instances with more than [`VERTEX_PIECE_LIMIT`] pieces are
    /// rejected with a capacity error.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        let m = self.num_pieces();
        if m > VERTEX_PIECE_LIMIT {
            return Err(Error::Capacity { pieces: m, limit: VERTEX_PIECE_LIMIT });
        }
        let t = self.cut_threshold();
        let c = &self.piece_values;
        let mut lambda = vec![0.0; m];
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for i in 0..m {
            if c[i] >= t {
                lambda.iter_mut().for_each(|l| *l = 0.0);
                lambda[i] = 1.0;
                candidates.push(self.map_multipliers(&lambda));
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                // Only edges that straddle the cut hyperplane produce a new
                // candidate; touching endpoints are already simplex corners.
                if (c[i] - t) * (c[j] - t) < 0.0 {
                    let w = (t - c[j]) / (c[i] - c[j]);
                    lambda.iter_mut().for_each(|l| *l = 0.0);
                    lambda[i] = w;
                    lambda[j] = 1.0 - w;
                    candidates.push(self.map_multipliers(&lambda));
                }
            }
        }

        let mut unique: Vec<Vec<f64>> = Vec::with_capacity(candidates.len());
        for cand in candidates {
            let dup = unique.iter().any(|u| linf_dist(u, &cand) <= VERTEX_DEDUP_TOL);
            if !dup {
                unique.push(cand);
            }
        }

        let mut out = Vec::with_capacity(unique.len());
        for (k, cand) in unique.iter().enumerate() {
            let others: Vec<&Vec<f64>> = unique
                .iter()
                .enumerate()
                .filter(|(l, _)| *l != k)
                .map(|(_, v)| v)
                .collect();
            if !in_convex_hull(cand, &others)? {
                out.push(cand.clone());
            }
        }
        Ok(out)
    }
}

fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Feasibility of `p ∈ conv(points)` at the LP tolerance.
fn in_convex_hull(p: &[f64], points: &[&Vec<f64>]) -> Result<bool> {
    let mut b = LpBuilder::new();
    let mu = b.add_vars(points.len(), Some(0.0), None);
    b.add_eq(mu.clone().map(|j| (j, 1.0)).collect(), 1.0);
    for k in 0..p.len() {
        b.add_eq(mu.clone().map(|j| (j, points[j][k])).collect(), p[k]);
    }
    Ok(lp::solve(&b.build())?.optimal().is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::Piece;

    fn abs_1d() -> MaxAffine {
        MaxAffine::new(1, vec![Piece::new(vec![1.0], 0.0), Piece::new(vec![-1.0], 0.0)]).unwrap()
    }

    fn sorted_scalars(vs: Vec<Vec<f64>>) -> Vec<f64> {
        let mut out: Vec<f64> = vs.into_iter().map(|v| v[0]).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Definitional grid oracle: scans slope candidates against the
    /// subgradient inequality over a dense 1-D grid of y values, returning
    /// the accepted slopes. Independent of the LP path.
    fn grid_membership_1d(f: &MaxAffine, x: f64, eps: f64) -> Vec<f64> {
        let fx = f.eval(&[x]).unwrap();
        let mut accepted = Vec::new();
        let mut s = -1.2;
        while s <= 1.2 + 1e-12 {
            let mut ok = true;
            let mut y = -100.0;
            while y <= 100.0 {
                let fy = f.eval(&[y]).unwrap();
                if fy - fx < s * (y - x) - eps - 1e-9 {
                    ok = false;
                    break;
                }
                y += 0.05;
            }
            if ok {
                accepted.push(s);
            }
            s += 0.01;
        }
        accepted
    }

    #[test]
    fn grid_oracle_pins_abs_interval_at_one() {
        // Frozen from the oracle: ∂_{0.5}|·|(1) = [0.5, 1].
        let acc = grid_membership_1d(&abs_1d(), 1.0, 0.5);
        let lo = acc.first().copied().unwrap();
        let hi = acc.last().copied().unwrap();
        assert!((lo - 0.5).abs() < 5e-3, "oracle lower end {lo}");
        assert!((hi - 1.0).abs() < 5e-3, "oracle upper end {hi}");
    }

    #[test]
    fn abs_at_one_eps_half_is_the_frozen_interval() {
        let s = eps_subdiff(&abs_1d(), &[1.0], 0.5).unwrap();
        let vs = sorted_scalars(s.vertices().unwrap());
        assert_eq!(vs.len(), 2);
        assert!((vs[0] - 0.5).abs() < 1e-9);
        assert!((vs[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn abs_at_zero_any_eps_is_unit_interval() {
        for eps in [0.0, 0.1, 1.0, 7.5] {
            let s = eps_subdiff(&abs_1d(), &[0.0], eps).unwrap();
            let vs = sorted_scalars(s.vertices().unwrap());
            assert_eq!(vs.len(), 2, "eps {eps}");
            assert!((vs[0] + 1.0).abs() < 1e-9);
            assert!((vs[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_piece_is_a_point() {
        let f = MaxAffine::new(2, vec![Piece::new(vec![3.0, -2.0], 1.0)]).unwrap();
        let s = eps_subdiff(&f, &[0.3, 0.7], 2.0).unwrap();
        let vs = s.vertices().unwrap();
        assert_eq!(vs.len(), 1);
        assert!(linf_dist(&vs[0], &[3.0, -2.0]) < 1e-12);
    }

    #[test]
    fn exact_subdiff_active_pieces_only() {
        let f = abs_1d();
        let vs = sorted_scalars(exact_subdiff(&f, &[1.0]).unwrap().vertices().unwrap());
        assert_eq!(vs, vec![1.0]);
        let vs0 = sorted_scalars(exact_subdiff(&f, &[0.0]).unwrap().vertices().unwrap());
        assert_eq!(vs0.len(), 2);
        assert!((vs0[0] + 1.0).abs() < 1e-12 && (vs0[1] - 1.0).abs() < 1e-12);
        // A dominated parallel piece is never active.
        let g = MaxAffine::new(1, vec![Piece::new(vec![1.0], 0.0), Piece::new(vec![1.0], -1.0)]).unwrap();
        let vg = sorted_scalars(exact_subdiff(&g, &[0.0]).unwrap().vertices().unwrap());
        assert_eq!(vg, vec![1.0]);
    }

    #[test]
    fn support_of_frozen_interval() {
        let s = eps_subdiff(&abs_1d(), &[1.0], 0.5).unwrap();
        assert!((s.support(&[1.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!((s.support(&[-1.0]).unwrap() + 0.5).abs() < 1e-9);
        assert!(s.support(&[0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn contains_frozen_interval_points() {
        let s = eps_subdiff(&abs_1d(), &[1.0], 0.5).unwrap();
        assert!(s.contains(&[0.75], 1e-9).unwrap());
        assert!(!s.contains(&[0.25], 1e-9).unwrap());
        // Gradient of the active piece is always a subgradient.
        assert!(s.contains(&[1.0], 1e-9).unwrap());
    }

    #[test]
    fn negative_epsilon_rejected() {
        assert!(matches!(eps_subdiff(&abs_1d(), &[0.0], -0.1), Err(Error::Input(_))));
    }

    #[test]
    fn capacity_limit_enforced() {
        let pieces: Vec<Piece> = (0..65).map(|i| Piece::new(vec![i as f64], 0.0)).collect();
        let f = MaxAffine::new(1, pieces).unwrap();
        let s = eps_subdiff(&f, &[0.0], 1.0).unwrap();
        assert!(matches!(s.vertices(), Err(Error::Capacity { pieces: 65, limit: 64 })));
    }

    #[test]
    fn closed_form_family_at_x_one() {
        // ∂ε|·|(1) = [max(−1, 1−ε), 1].
        for eps in [0.0, 0.25, 0.5, 2.0] {
            let s = eps_subdiff(&abs_1d(), &[1.0], eps).unwrap();
            let vs = sorted_scalars(s.vertices().unwrap());
            let lo = (1.0 - eps).max(-1.0);
            if eps == 0.0 {
                assert_eq!(vs.len(), 1);
                assert!((vs[0] - 1.0).abs() < 1e-9);
            } else {
                assert_eq!(vs.len(), 2, "eps {eps}");
                assert!((vs[0] - lo).abs() < 1e-9, "eps {eps}: {} vs {lo}", vs[0]);
                assert!((vs[1] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn vertices_2d_cross_polytope_cut() {
        // max(x, −x, y, −y) at the origin: ∂f(0) is the convex hull of the
        // four unit gradients.
        let f = MaxAffine::new(
            2,
            vec![
                Piece::new(vec![1.0, 0.0], 0.0),
                Piece::new(vec![-1.0, 0.0], 0.0),
                Piece::new(vec![0.0, 1.0], 0.0),
                Piece::new(vec![0.0, -1.0], 0.0),
            ],
        )
        .unwrap();
        let s = exact_subdiff(&f, &[0.0, 0.0]).unwrap();
        let vs = s.vertices().unwrap();
        assert_eq!(vs.len(), 4);
    }
}
