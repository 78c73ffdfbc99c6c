//! Independent ground truth for validating the certifier: the exact
//! Lipschitz constant of a piecewise-affine difference via coincidence-cell
//! enumeration, sampled difference quotients, definitional membership
//! falsification, and seeded instance generation.
//!
//! The exactness argument for [`lipschitz_exact`] is standard convex
//! analysis, spelled out in the repository's `THEORY.md`: a piecewise-affine
//! function is Lipschitz with constant equal to the largest dual-norm
//! gradient over the full-dimensional cells of its affine regions, and for
//! `f − g` those gradients are exactly the pairwise gaps `a_i − c_j` on the
//! cells where piece `i` of `f` and piece `j` of `g` are simultaneously
//! strictly maximal.

use crate::error::{Error, Result};
use crate::funcrep::{dot, MaxAffine, Piece, PointSet};
use crate::geometry::Norm;
use crate::lp::{self, LpBuilder};

/// Margin by which both pieces must strictly dominate at the cell LP
/// optimum for the cell to count as full-dimensional.
pub const CELL_MARGIN: f64 = 1e-7;

/// Cap on the domination margin in the cell LP; unbounded cells would
/// otherwise make the margin objective unbounded.
const MARGIN_CAP: f64 = 1.0;

/// A 64-bit linear congruential generator with Knuth's MMIX constants:
/// `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2^64)`.
/// Doubles take the top 53 bits of the advanced state. The scheme is part
/// of the interchange contract so that recorded instances are reproducible
/// across implementations.
#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Evidence that a pair of pieces is simultaneously strictly maximal on a
/// full-dimensional region.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CellWitness {
    /// `(i, j)`: piece `i` of `f` and piece `j` of `g`.
    pub piece_pair: (usize, usize),
    /// `‖a_i − c_j‖∗`.
    pub gradient_gap: f64,
    /// A point where both pieces dominate their siblings by at least
    /// [`CELL_MARGIN`].
    pub interior_point: Vec<f64>,
}

fn same_piece(p: &Piece, q: &Piece) -> bool {
    p.intercept == q.intercept && p.gradient == q.gradient
}

/// Margin LP for the coincidence cell of pieces `(i, j)`: maximize the
/// domination slack `δ ≤ MARGIN_CAP` subject to piece `i` beating every
/// other piece of `f` by `δ` and piece `j` every other piece of `g`.
/// Exact duplicates of the candidate piece are exempt from domination.
fn cell_margin(f: &MaxAffine, g: &MaxAffine, i: usize, j: usize) -> Result<Option<(f64, Vec<f64>)>> {
    let dim = f.dim();
    let mut b = LpBuilder::new();
    let x = b.add_vars(dim, None, None);
    let delta = b.add_var(None, Some(MARGIN_CAP));
    b.objective(delta, -1.0);
    let mut add_rows = |h: &MaxAffine, top: usize| {
        let lead = &h.pieces()[top];
        for (k, p) in h.pieces().iter().enumerate() {
            if k == top || same_piece(p, lead) {
                continue;
            }
            // ⟨a_top − a_k, x⟩ + (b_top − b_k) ≥ δ
            let mut terms: Vec<(usize, f64)> = x
                .clone()
                .map(|c| (c, p.gradient[c - x.start] - lead.gradient[c - x.start]))
                .collect();
            terms.push((delta, 1.0));
            b.add_leq(terms, lead.intercept - p.intercept);
        }
    };
    add_rows(f, i);
    add_rows(g, j);
    match lp::solve(&b.build())? {
        lp::LpSolution::Optimal { z, .. } => {
            let margin = z[delta];
            if margin >= CELL_MARGIN {
                Ok(Some((margin, z[x].to_vec())))
            } else {
                Ok(None)
            }
        }
        lp::LpSolution::Infeasible => Ok(None),
        lp::LpSolution::Unbounded => {
            Err(Error::Numerical("cell margin LP reported unbounded".into()))
        }
    }
}

/// All full-dimensional coincidence cells of the pair, in lexicographic
/// `(i, j)` order, each with its gradient gap and an interior point.
pub fn coincidence_cells(f: &MaxAffine, g: &MaxAffine, norm: Norm) -> Result<Vec<CellWitness>> {
    if f.dim() != g.dim() {
        return Err(Error::Input(format!(
            "dimensions differ: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    let mut cells = Vec::new();
    for i in 0..f.num_pieces() {
        for j in 0..g.num_pieces() {
            if let Some((_, point)) = cell_margin(f, g, i, j)? {
                let gap: Vec<f64> = f.pieces()[i]
                    .gradient
                    .iter()
                    .zip(&g.pieces()[j].gradient)
                    .map(|(a, c)| a - c)
                    .collect();
                cells.push(CellWitness {
                    piece_pair: (i, j),
                    gradient_gap: norm.dual(&gap),
                    interior_point: point,
                });
            }
        }
    }
    Ok(cells)
}

/// The exact Lipschitz constant of `f − g` on R^n in the primal `norm`,
/// with an interior point of the attaining coincidence cell as witness.
/// Ties between cells resolve to the lowest `(i, j)`.
pub fn lipschitz_exact(f: &MaxAffine, g: &MaxAffine, norm: Norm) -> Result<(f64, CellWitness)> {
    let mut best: Option<CellWitness> = None;
    for cell in coincidence_cells(f, g, norm)? {
        if best.as_ref().is_none_or(|b| cell.gradient_gap > b.gradient_gap) {
            best = Some(cell);
        }
    }
    match best {
        Some(w) => Ok((w.gradient_gap, w)),
        None => Err(Error::Numerical(
            "no full-dimensional coincidence cell found; the instance is degenerate".into(),
        )),
    }
}

/// Largest sampled difference quotient `|Δ(f−g)| / ‖Δx‖` over `n_pairs`
/// seeded-uniform pairs in the box. A lower bound on the true constant;
/// deterministic for a fixed seed.
pub fn lipschitz_sampled(
    f: &MaxAffine,
    g: &MaxAffine,
    lo: &[f64],
    hi: &[f64],
    n_pairs: usize,
    seed: u64,
    norm: Norm,
) -> Result<f64> {
    let dim = f.dim();
    if g.dim() != dim {
        return Err(Error::Input(format!("dimensions differ: {dim} vs {}", g.dim())));
    }
    if lo.len() != dim || hi.len() != dim {
        return Err(Error::Input("box bounds must match the dimension".into()));
    }
    if lo.iter().zip(hi).any(|(l, h)| !l.is_finite() || !h.is_finite() || l >= h) {
        return Err(Error::Input("degenerate box: need lo < hi componentwise".into()));
    }
    if n_pairs == 0 {
        return Err(Error::Input("n_pairs must be ≥ 1".into()));
    }
    let mut rng = Lcg64::new(seed);
    let draw = |rng: &mut Lcg64| -> Vec<f64> {
        (0..dim).map(|k| rng.uniform(lo[k], hi[k])).collect()
    };
    let mut best = 0.0f64;
    for _ in 0..n_pairs {
        let x = draw(&mut rng);
        let mut y = draw(&mut rng);
        while y == x {
            y = draw(&mut rng);
        }
        let dfg = (f.eval(&x)? - g.eval(&x)?) - (f.eval(&y)? - g.eval(&y)?);
        let step: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        best = best.max(dfg.abs() / norm.primal(&step));
    }
    Ok(best)
}

/// Checks the defining inequality `f(y) − f(x) ≥ ⟨y − x, s⟩ − ε` over each
/// sampled `y`. A `false` answer certifies non-membership (up to the
/// comparison tolerance `1e-9` relative to the magnitudes involved); `true`
/// is evidence only.
pub fn definitional_membership(
    f: &MaxAffine,
    x: &[f64],
    s: &[f64],
    epsilon: f64,
    y_samples: &PointSet,
) -> Result<bool> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Input(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
    }
    if s.len() != f.dim() {
        return Err(Error::Input(format!(
            "slope has length {}, expected {}",
            s.len(),
            f.dim()
        )));
    }
    if y_samples.dim() != f.dim() {
        return Err(Error::Input("sample set dimension mismatch".into()));
    }
    let fx = f.eval(x)?;
    for y in y_samples.points() {
        let fy = f.eval(y)?;
        let step: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let pairing = dot(&step, s);
        let tol = 1e-9 * (1.0 + fx.abs() + fy.abs() + pairing.abs());
        if fy - fx < pairing - epsilon - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Seeded random instance pair. Coefficients are drawn uniformly from
/// `[−coeff_range, coeff_range]`, filling `f` piece by piece (gradient
/// coordinates, then the intercept) and then `g` the same way.
pub fn random_instance(
    dim: usize,
    n_pieces_f: usize,
    n_pieces_g: usize,
    coeff_range: f64,
    seed: u64,
) -> Result<(MaxAffine, MaxAffine)> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Input(format!("dim must be in [1, 3], got {dim}")));
    }
    for n in [n_pieces_f, n_pieces_g] {
        if !(1..=16).contains(&n) {
            return Err(Error::Input(format!("piece counts must be in [1, 16], got {n}")));
        }
    }
    if !coeff_range.is_finite() || coeff_range <= 0.0 {
        return Err(Error::Input(format!("coeff_range must be finite and > 0, got {coeff_range}")));
    }
    let mut rng = Lcg64::new(seed);
    let gen = |n: usize, rng: &mut Lcg64| -> MaxAffine {
        let pieces = (0..n)
            .map(|_| {
                let gradient = (0..dim).map(|_| rng.uniform(-coeff_range, coeff_range)).collect();
                let intercept = rng.uniform(-coeff_range, coeff_range);
                Piece::new(gradient, intercept)
            })
            .collect();
        MaxAffine::new(dim, pieces).expect("generated coefficients are finite")
    };
    let f = gen(n_pieces_f, &mut rng);
    let g = gen(n_pieces_g, &mut rng);
    Ok((f, g))
}
