//! Max-affine convex functions and evaluation-point sets, plus their JSON
//! interchange format.
//!
//! A [`MaxAffine`] value is a finite pointwise maximum of affine pieces
//! `x ↦ max_i (⟨a_i, x⟩ + b_i)`. Everything in this crate is represented
//! this way: the convex functions under test and the polyhedral moduli
//! that bound their variation. Values are immutable after construction
//! and all operations are pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance for deciding which pieces are active,
/// consistent with the LP feasibility tolerance.
pub const ACTIVE_TOL: f64 = 1e-9;

/// One affine piece `x ↦ ⟨gradient, x⟩ + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(rename = "a")]
    pub gradient: Vec<f64>,
    #[serde(rename = "b")]
    pub intercept: f64,
}

impl Piece {
    pub fn new(gradient: Vec<f64>, intercept: f64) -> Self {
        Piece { gradient, intercept }
    }
}

/// A finite-valued polyhedral convex function on R^n: the maximum of a
/// nonempty list of affine pieces. Duplicate or dominated pieces are
/// permitted; they are part of the representation and are never pruned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaxAffineDoc", into = "MaxAffineDoc")]
pub struct MaxAffine {
    dim: usize,
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
struct MaxAffineDoc {
    dim: usize,
    pieces: Vec<Piece>,
}

impl TryFrom<MaxAffineDoc> for MaxAffine {
    type Error = Error;
    fn try_from(doc: MaxAffineDoc) -> Result<Self> {
        MaxAffine::new(doc.dim, doc.pieces)
    }
}

impl From<MaxAffine> for MaxAffineDoc {
    fn from(f: MaxAffine) -> Self {
        MaxAffineDoc { dim: f.dim, pieces: f.pieces }
    }
}

impl MaxAffine {
    /// Builds a max-affine function, checking the representation invariants:
    /// positive dimension, at least one piece, gradients of matching length,
    /// all coefficients finite.
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse("dim: must be a positive integer".into()));
        }
        if pieces.is_empty() {
            return Err(Error::Parse("pieces: must be nonempty".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.gradient.len() != dim {
                return Err(Error::Parse(format!(
                    "pieces[{i}].a: length {} does not match dim {dim}",
                    p.gradient.len()
                )));
            }
            if let Some(k) = p.gradient.iter().position(|c| !c.is_finite()) {
                return Err(Error::Parse(format!("pieces[{i}].a[{k}]: not a finite number")));
            }
            if !p.intercept.is_finite() {
                return Err(Error::Parse(format!("pieces[{i}].b: not a finite number")));
            }
        }
        Ok(MaxAffine { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Input(format!(
                "point has length {}, expected {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Value of each affine piece at `x`, in piece order.
    pub fn piece_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self
            .pieces
            .iter()
            .map(|p| dot(&p.gradient, x) + p.intercept)
            .collect())
    }

    /// `max_i (⟨a_i, x⟩ + b_i)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let vals = self.piece_values(x)?;
        Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
    }

    /// Indices of the pieces within `tol·max(1, |f(x)|)` of the maximum at `x`.
    /// Nonempty for every `x` when `tol ≥ 0`.
    pub fn active_set(&self, x: &[f64], tol: f64) -> Result<Vec<usize>> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::Input(format!("active_set tolerance must be ≥ 0, got {tol}")));
        }
        let vals = self.piece_values(x)?;
        let v = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cutoff = v - tol * v.abs().max(1.0);
        Ok(vals
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= cutoff)
            .map(|(i, _)| i)
            .collect())
    }

    /// The same function shifted by a constant: every intercept moved by `c`.
    pub fn shifted(&self, c: f64) -> MaxAffine {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece::new(p.gradient.clone(), p.intercept + c))
            .collect();
        MaxAffine { dim: self.dim, pieces }
    }

    /// Value at the origin, `max_i b_i`.
    pub fn value_at_origin(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.intercept)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Accepts `h` as a variation modulus iff `h(0) = 0`, i.e. `max_i b_i = 0`.
/// Returns the function unchanged.
pub fn validate_modulus(h: MaxAffine) -> Result<MaxAffine> {
    let v = h.value_at_origin();
    if v != 0.0 {
        return Err(Error::Modulus { value: v });
    }
    Ok(h)
}

/// A finite list of evaluation points in R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetDoc", into = "PointSetDoc")]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PointSetDoc {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<PointSetDoc> for PointSet {
    type Error = Error;
    fn try_from(doc: PointSetDoc) -> Result<Self> {
        PointSet::new(doc.dim, doc.points)
    }
}

impl From<PointSet> for PointSetDoc {
    fn from(p: PointSet) -> Self {
        PointSetDoc { dim: p.dim, points: p.points }
    }
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse("dim: must be a positive integer".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Parse(format!(
                    "points[{i}]: length {} does not match dim {dim}",
                    p.len()
                )));
            }
            if let Some(k) = p.iter().position(|c| !c.is_finite()) {
                return Err(Error::Parse(format!("points[{i}][{k}]: not a finite number")));
            }
        }
        Ok(PointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Regular lattice over the box `[lo, hi]^dim` with `per_dim` points per
    /// axis (axis midpoint when `per_dim == 1`).
    pub fn lattice(dim: usize, lo: f64, hi: f64, per_dim: usize) -> Result<Self> {
        if dim == 0 || per_dim == 0 {
            return Err(Error::Input("lattice: dim and per_dim must be ≥ 1".into()));
        }
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Input(format!("lattice: need lo < hi, got [{lo}, {hi}]")));
        }
        let axis: Vec<f64> = if per_dim == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..per_dim)
                .map(|i| lo + (hi - lo) * i as f64 / (per_dim - 1) as f64)
                .collect()
        };
        let mut points = Vec::with_capacity(per_dim.pow(dim as u32));
        let mut idx = vec![0usize; dim];
        loop {
            points.push(idx.iter().map(|&i| axis[i]).collect());
            let mut k = dim;
            loop {
                if k == 0 {
                    return PointSet::new(dim, points);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < per_dim {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn map_json_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Parses the `{"dim": n, "pieces": [{"a": [...], "b": ...}, ...]}` document.
pub fn parse_maxaffine(text: &str) -> Result<MaxAffine> {
    let doc: MaxAffineDoc = serde_json::from_str(text).map_err(map_json_err)?;
    MaxAffine::try_from(doc)
}

/// Serializes to the schema accepted by [`parse_maxaffine`]; floats are
/// written in shortest round-trip decimal form.
pub fn maxaffine_json(f: &MaxAffine) -> String {
    serde_json::to_string(f).expect("max-affine serialization cannot fail")
}

/// Parses the `{"dim": n, "points": [[...], ...]}` document.
pub fn parse_pointset(text: &str) -> Result<PointSet> {
    let doc: PointSetDoc = serde_json::from_str(text).map_err(map_json_err)?;
    PointSet::try_from(doc)
}

pub fn pointset_json(p: &PointSet) -> String {
    serde_json::to_string(p).expect("point-set serialization cannot fail")
}
