//! Certification layer: subdifferential conditions for Lipschitz
//! continuity of a difference of max-affine functions, minimal certified
//! constants, segment-chain certificates, and the constancy /
//! exact-subdifferential / global-minimum checks.
//!
//! Three pointwise conditions are evaluated, for a pair `f, g`, a point `x`,
//! a tolerance `ε ≥ 0` and a modulus set `M(ε)` (a dual-norm ball of radius
//! `K`, or `∂εh(0)` of a polyhedral modulus `h`):
//!
//! * `II` — inclusion: `∂εf(x) ⊂ ∂εg(x) ⊕ M(ε)`;
//! * `IV` — intersection: `∂εf(x) ∩ (∂εg(x) ⊕ M(ε)) ≠ ∅`;
//! * `VI` — distance bound: `d(∂εf(x), ∂εg(x)) ≤ K` (ball moduli only).
//!
//! `f − g` is Lipschitz with constant `K` exactly when these hold at every
//! point and every `ε > 0`, so one false verdict anywhere refutes the
//! constant outright, while a passing sweep certifies it relative to the
//! tested grid. The `*_exact` entry point upgrades grid-relative
//! certificates to global ones by comparing `K` against the oracle's exact
//! constant, which is available because the functions are polyhedral.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcrep::{dot, MaxAffine, PointSet, ACTIVE_TOL};
use crate::geometry::{
    distance, included_in_sum, intersects, DualBallSpec, Inclusion, ModulusSet, Norm,
};
use crate::lp::{self, LpBuilder};
use crate::oracle;
use crate::subdiff::{eps_subdiff, SubdiffPolytope};

/// Slack for distance-vs-K comparisons, relative to the constant tested.
const DISTANCE_SLACK: f64 = 1e-9;

/// The three checkable conditions, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Condition {
    /// `∂εf(x) ⊂ ∂εg(x) ⊕ M(ε)`
    #[serde(rename = "II")]
    Inclusion,
    /// `∂εf(x) ∩ (∂εg(x) ⊕ M(ε)) ≠ ∅`
    #[serde(rename = "IV")]
    Intersection,
    /// `d(∂εf(x), ∂εg(x)) ≤ K`
    #[serde(rename = "VI")]
    Distance,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Condition::Inclusion => "II",
            Condition::Intersection => "IV",
            Condition::Distance => "VI",
        })
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "II" | "ii" => Ok(Condition::Inclusion),
            "IV" | "iv" => Ok(Condition::Intersection),
            "VI" | "vi" => Ok(Condition::Distance),
            other => Err(Error::Input(format!(
                "unknown condition {other:?}, expected II, IV or VI"
            ))),
        }
    }
}

/// How the modulus set is built at each tested `ε`: a fixed dual-norm ball,
/// or `∂εh(0)` of a polyhedral modulus (the same `ε` as the
/// subdifferentials, which is how the conditions couple them).
#[derive(Clone, Debug)]
pub enum ModulusSpec {
    Ball(DualBallSpec),
    Function(MaxAffine),
}

impl ModulusSpec {
    pub fn ball(radius: f64, norm: Norm) -> Result<Self> {
        Ok(ModulusSpec::Ball(DualBallSpec::new(radius, norm)?))
    }

    /// Wraps a modulus function, requiring `h(0) = 0`.
    pub fn function(h: MaxAffine) -> Result<Self> {
        Ok(ModulusSpec::Function(crate::funcrep::validate_modulus(h)?))
    }

    pub fn at_eps(&self, epsilon: f64) -> Result<ModulusSet> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Input(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
        }
        Ok(match self {
            ModulusSpec::Ball(b) => ModulusSet::Ball(*b),
            ModulusSpec::Function(h) => ModulusSet::Polyhedral { h: h.clone(), epsilon },
        })
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let ModulusSpec::Function(h) = self {
            if h.dim() != dim {
                return Err(Error::Input(format!(
                    "modulus dimension {} does not match ambient dimension {dim}",
                    h.dim()
                )));
            }
        }
        Ok(())
    }
}

/// Verdict of one condition at one `(x, ε)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub condition: Condition,
    #[serde(rename = "x")]
    pub point: Vec<f64>,
    pub epsilon: f64,
    pub verdict: bool,
    /// Common point for a true `IV`; violating vertex for a false `II`.
    pub witness: Option<Vec<f64>>,
    /// The computed distance, for `VI`.
    pub value: Option<f64>,
}

/// Overall outcome of a certification sweep. `Refuted` is globally sound
/// (one counterexample kills the constant at every scale); `Certified` is
/// relative to the tested grid unless produced by the exact path;
/// `Inconclusive` means no check ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

/// The first failing check, when a sweep refutes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    #[serde(rename = "x")]
    pub point: Vec<f64>,
    pub epsilon: Option<f64>,
    pub detail: String,
}

/// Per-point, per-ε verdicts plus the overall outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CertReport {
    pub overall: Verdict,
    pub results: Vec<CheckResult>,
    pub refutation: Option<Refutation>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    overall: Verdict,
    results: &'a [CheckResult],
    refutation: &'a Option<Refutation>,
}

impl CertReport {
    /// The fixed-field-order report document.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ReportDoc {
            overall: self.overall,
            results: &self.results,
            refutation: &self.refutation,
        })
        .expect("report serialization cannot fail")
    }
}

fn check_pair_dims(f: &MaxAffine, g: &MaxAffine) -> Result<usize> {
    if f.dim() != g.dim() {
        return Err(Error::Input(format!(
            "dimensions differ: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(f.dim())
}

fn eval_condition(
    a: &SubdiffPolytope,
    b: &SubdiffPolytope,
    modulus: &ModulusSpec,
    epsilon: f64,
    condition: Condition,
) -> Result<CheckResult> {
    let (verdict, witness, value) = match condition {
        Condition::Inclusion => match included_in_sum(a, b, &modulus.at_eps(epsilon)?)? {
            Inclusion::Included => (true, None, None),
            Inclusion::Violated(v) => (false, Some(v), None),
        },
        Condition::Intersection => match intersects(a, b, &modulus.at_eps(epsilon)?)? {
            Some(w) => (true, Some(w), None),
            None => (false, None, None),
        },
        Condition::Distance => {
            let ModulusSpec::Ball(ball) = modulus else {
                return Err(Error::Unsupported(
                    "condition VI is defined for ball moduli only".into(),
                ));
            };
            let d = distance(a, b, ball.norm)?;
            (d <= ball.radius + DISTANCE_SLACK * (1.0 + ball.radius), None, Some(d))
        }
    };
    Ok(CheckResult {
        condition,
        point: a.point().to_vec(),
        epsilon,
        verdict,
        witness,
        value,
    })
}

/// Evaluates one condition at one `(x, ε)`.
pub fn check_condition(
    f: &MaxAffine,
    g: &MaxAffine,
    modulus: &ModulusSpec,
    x: &[f64],
    epsilon: f64,
    condition: Condition,
) -> Result<CheckResult> {
    let dim = check_pair_dims(f, g)?;
    modulus.check_dim(dim)?;
    let a = eps_subdiff(f, x, epsilon)?;
    let b = eps_subdiff(g, x, epsilon)?;
    eval_condition(&a, &b, modulus, epsilon, condition)
}

fn normalized_conditions(conditions: &[Condition]) -> Vec<Condition> {
    let mut c = conditions.to_vec();
    c.sort();
    c.dedup();
    c
}

/// Runs every `(x, ε, condition)` check in deterministic order (grid index,
/// then ε, then condition) and aggregates. Stops at the first false verdict:
/// one counterexample refutes the constant globally, while `Certified` is
/// relative to the tested set.
pub fn certify_lipschitz(
    f: &MaxAffine,
    g: &MaxAffine,
    modulus: &ModulusSpec,
    grid: &PointSet,
    eps_grid: &[f64],
    conditions: &[Condition],
) -> Result<CertReport> {
    let dim = check_pair_dims(f, g)?;
    modulus.check_dim(dim)?;
    if grid.dim() != dim {
        return Err(Error::Input(format!(
            "grid dimension {} does not match function dimension {dim}",
            grid.dim()
        )));
    }
    if eps_grid.is_empty() {
        return Err(Error::Input("eps grid must be nonempty".into()));
    }
    if let Some(bad) = eps_grid.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(Error::Input(format!("eps grid entries must be finite and ≥ 0, got {bad}")));
    }
    let conditions = normalized_conditions(conditions);
    if matches!(modulus, ModulusSpec::Function(_)) && conditions.contains(&Condition::Distance) {
        return Err(Error::Unsupported("condition VI is defined for ball moduli only".into()));
    }

    let mut results = Vec::new();
    for x in grid.points() {
        for &eps in eps_grid {
            let a = eps_subdiff(f, x, eps)?;
            let b = eps_subdiff(g, x, eps)?;
            for &cond in &conditions {
                let r = eval_condition(&a, &b, modulus, eps, cond)?;
                let failed = !r.verdict;
                results.push(r);
                if failed {
                    let detail = match cond {
                        Condition::Inclusion => {
                            "a vertex of the ε-subdifferential of f escapes the sum".to_string()
                        }
                        Condition::Intersection => {
                            "the ε-subdifferential of f misses the sum entirely".to_string()
                        }
                        Condition::Distance => {
                            let last = results.last().expect("just pushed");
                            format!(
                                "subdifferential distance {} exceeds the candidate constant",
                                last.value.expect("VI carries its distance")
                            )
                        }
                    };
                    return Ok(CertReport {
                        overall: Verdict::Refuted,
                        refutation: Some(Refutation {
                            point: x.clone(),
                            epsilon: Some(eps),
                            detail,
                        }),
                        results,
                    });
                }
            }
        }
    }
    let overall = if results.is_empty() { Verdict::Inconclusive } else { Verdict::Certified };
    Ok(CertReport { overall, results, refutation: None })
}

/// Grid sweep followed by an exact comparison: the grid can only refute, so
/// a surviving `K` is promoted to a global verdict by comparing it against
/// the oracle's exact constant for the (polyhedral) difference.
pub fn certify_lipschitz_exact(
    f: &MaxAffine,
    g: &MaxAffine,
    k: f64,
    norm: Norm,
    grid: &PointSet,
    eps_grid: &[f64],
    conditions: &[Condition],
) -> Result<CertReport> {
    let modulus = ModulusSpec::ball(k, norm)?;
    let mut report = certify_lipschitz(f, g, &modulus, grid, eps_grid, conditions)?;
    if report.overall == Verdict::Refuted {
        return Ok(report);
    }
    let (kstar, witness) = oracle::lipschitz_exact(f, g, norm)?;
    if k >= kstar - DISTANCE_SLACK * (1.0 + kstar) {
        report.overall = Verdict::Certified;
    } else {
        report.overall = Verdict::Refuted;
        report.refutation = Some(Refutation {
            point: witness.interior_point,
            epsilon: None,
            detail: format!("exact Lipschitz constant {kstar} exceeds the candidate {k}"),
        });
    }
    Ok(report)
}

/// The least constant certified by the distance condition over the grid:
/// `max_x d(∂f(x), ∂g(x))` at `ε = eps_floor` (0 is exact for polyhedral
/// functions; both sets grow with ε, so the distance only shrinks as ε
/// increases and the floor dominates).
pub fn min_lipschitz(
    f: &MaxAffine,
    g: &MaxAffine,
    grid: &PointSet,
    eps_floor: f64,
    norm: Norm,
) -> Result<f64> {
    let dim = check_pair_dims(f, g)?;
    if grid.dim() != dim {
        return Err(Error::Input("grid dimension mismatch".into()));
    }
    if grid.is_empty() {
        return Err(Error::Input("grid must be nonempty".into()));
    }
    let mut k = 0.0f64;
    for x in grid.points() {
        let a = eps_subdiff(f, x, eps_floor)?;
        let b = eps_subdiff(g, x, eps_floor)?;
        k = k.max(distance(&a, &b, norm)?);
    }
    Ok(k)
}

/// One selected triple of the chain construction at an interior point:
/// `u = v + w` with `u ∈ ∂f`, `v ∈ ∂g`, `w ∈ M`, all at the chain's
/// reduced tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainTriple {
    pub index: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

/// Transcript of the segment-chain construction between `x` and `y`: the
/// chain points, the endpoint subgradients, the per-point triples, and the
/// telescoped lower bound they certify for
/// `f(y) − f(x) + g(x) − g(y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCertificate {
    pub feasible: bool,
    pub m: usize,
    pub epsilon: f64,
    pub gamma_m: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u_star: Vec<f64>,
    pub v_star: Vec<f64>,
    pub chain_points: Vec<Vec<f64>>,
    pub triples: Vec<ChainTriple>,
    /// Right-hand side of the telescoped inequality; absent when the chain
    /// is infeasible.
    pub bound_value: Option<f64>,
    pub actual_value: f64,
    /// First chain index whose intersection is empty, when infeasible.
    pub failure_index: Option<usize>,
}

/// Selects a triple at one chain point by LP, maximizing `⟨y − x, w⟩` over
/// the intersection system so the certified bound is as tight as the
/// selected modulus element allows. `None` means the intersection is empty.
fn chain_step(
    f: &MaxAffine,
    g: &MaxAffine,
    modulus: &ModulusSpec,
    xi: &[f64],
    eps_i: f64,
    dir: &[f64],
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let a = eps_subdiff(f, xi, eps_i)?;
    let b = eps_subdiff(g, xi, eps_i)?;
    let m = modulus.at_eps(eps_i)?;
    let mut lp_b = LpBuilder::new();
    let la = a.add_multiplier_block(&mut lp_b);
    let lb = b.add_multiplier_block(&mut lp_b);
    let u = m.add_block(a.dim(), &mut lp_b)?;
    for (k, &d) in dir.iter().enumerate() {
        lp_b.objective(u.start + k, -d);
    }
    for k in 0..a.dim() {
        let mut terms: Vec<(usize, f64)> = la.clone().zip(a.image_coeffs(k)).collect();
        terms.extend(lb.clone().zip(b.image_coeffs(k)).map(|(j, c)| (j, -c)));
        terms.push((u.start + k, -1.0));
        lp_b.add_eq(terms, 0.0);
    }
    match lp::solve(&lp_b.build())? {
        lp::LpSolution::Optimal { z, .. } => {
            let w = z[u].to_vec();
            let v = b.map_multipliers(&z[lb]);
            Ok(Some((v, w)))
        }
        lp::LpSolution::Infeasible => Ok(None),
        lp::LpSolution::Unbounded => {
            Err(Error::Numerical("chain-step LP reported unbounded".into()))
        }
    }
}

/// Runs the chain construction for one `(x, y, m, ε)`.
///
/// The chain points are `x + (i/m)(y − x)`; the per-point tolerance is
/// `γ_m ε / m` with `γ_m = 1/(2m)`, and the endpoint subgradients are the
/// lowest-index active-piece gradients of `f` at `x` and `g` at `y`. When
/// every interior intersection is nonempty the certificate is feasible and
/// `actual_value ≥ bound_value` up to LP tolerance; an empty intersection
/// anywhere refutes the modulus and is reported with its chain index.
/// A zero-length chain (`x = y`) is feasible by convention with the
/// constant bound `−2ε − 2(m−1)γ_m ε / m`.
pub fn chain_certificate(
    f: &MaxAffine,
    g: &MaxAffine,
    modulus: &ModulusSpec,
    x: &[f64],
    y: &[f64],
    m: usize,
    epsilon: f64,
) -> Result<ChainCertificate> {
    let dim = check_pair_dims(f, g)?;
    modulus.check_dim(dim)?;
    if m == 0 {
        return Err(Error::Input("chain length m must be ≥ 1".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Input(format!("epsilon must be finite and > 0, got {epsilon}")));
    }
    if x.len() != dim || y.len() != dim {
        return Err(Error::Input("endpoint dimension mismatch".into()));
    }

    let mf = m as f64;
    let gamma = 1.0 / (2.0 * mf);
    let eps_i = gamma * epsilon / mf;
    let dir: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let chain_points: Vec<Vec<f64>> = (0..=m)
        .map(|i| {
            x.iter()
                .zip(&dir)
                .map(|(&xv, &dv)| xv + dv * i as f64 / mf)
                .collect()
        })
        .collect();

    let u_star =
        f.pieces()[f.active_set(x, ACTIVE_TOL)?[0]].gradient.clone();
    let v_star =
        g.pieces()[g.active_set(y, ACTIVE_TOL)?[0]].gradient.clone();
    let actual_value = f.eval(y)? - f.eval(x)? + g.eval(x)? - g.eval(y)?;
    let constant_penalty = -2.0 * (mf - 1.0) / mf * gamma * epsilon - 2.0 * epsilon;

    let mut triples = Vec::new();
    if x != y {
        for i in 1..m {
            match chain_step(f, g, modulus, &chain_points[i], eps_i, &dir)? {
                Some((v, w)) => {
                    let u = v.iter().zip(&w).map(|(a, b)| a + b).collect();
                    triples.push(ChainTriple { index: i, u, v, w });
                }
                None => {
                    return Ok(ChainCertificate {
                        feasible: false,
                        m,
                        epsilon,
                        gamma_m: gamma,
                        x: x.to_vec(),
                        y: y.to_vec(),
                        u_star,
                        v_star,
                        chain_points,
                        triples,
                        bound_value: None,
                        actual_value,
                        failure_index: Some(i),
                    });
                }
            }
        }
    }

    let endpoint_gap: Vec<f64> = u_star.iter().zip(&v_star).map(|(a, b)| a - b).collect();
    let mut bound = dot(&dir, &endpoint_gap) / mf + constant_penalty;
    for t in &triples {
        bound += dot(&dir, &t.w) / mf;
    }

    Ok(ChainCertificate {
        feasible: true,
        m,
        epsilon,
        gamma_m: gamma,
        x: x.to_vec(),
        y: y.to_vec(),
        u_star,
        v_star,
        chain_points,
        triples,
        bound_value: Some(bound),
        actual_value,
        failure_index: None,
    })
}

/// Outcome of the constancy check: the subdifferential-distance criterion,
/// and the direct value comparison that corroborates it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstancyResult {
    /// All tested distances `d(∂εf(x), ∂εg(x))` were ≤ tol.
    pub constant: bool,
    /// `(f − g)` at the first grid point, when constant.
    pub c: Option<f64>,
    pub max_distance: f64,
    /// Whether `|(f − g)(x) − c| ≤ tol` across the grid, when constant.
    pub values_agree: Option<bool>,
    pub max_value_deviation: Option<f64>,
}

/// Decides whether `f − g` is constant on the tested set by checking
/// `d(∂εf(x), ∂εg(x)) ≤ tol` for every grid point and every ε, then
/// corroborates with a direct sweep of `(f − g)` values.
pub fn check_constancy(
    f: &MaxAffine,
    g: &MaxAffine,
    grid: &PointSet,
    eps_grid: &[f64],
    tol: f64,
    norm: Norm,
) -> Result<ConstancyResult> {
    let dim = check_pair_dims(f, g)?;
    if grid.dim() != dim {
        return Err(Error::Input("grid dimension mismatch".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Input(format!("tolerance must be ≥ 0, got {tol}")));
    }
    let mut max_distance = 0.0f64;
    for x in grid.points() {
        for &eps in eps_grid {
            let a = eps_subdiff(f, x, eps)?;
            let b = eps_subdiff(g, x, eps)?;
            max_distance = max_distance.max(distance(&a, &b, norm)?);
        }
    }
    let constant = max_distance <= tol;
    let (c, values_agree, max_value_deviation) = if constant && !grid.is_empty() {
        let x0 = &grid.points()[0];
        let c = f.eval(x0)? - g.eval(x0)?;
        let mut dev = 0.0f64;
        for x in grid.points() {
            dev = dev.max((f.eval(x)? - g.eval(x)? - c).abs());
        }
        (Some(c), Some(dev <= tol), Some(dev))
    } else {
        (None, None, None)
    };
    Ok(ConstancyResult { constant, c, values_agree, max_value_deviation, max_distance })
}

/// Raw per-point facts about the exact (`ε = 0`) subdifferentials. The
/// three predicates are equivalent only when they hold at every point of
/// the space; this reports them point by point without that quantifier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubdiffComparison {
    #[serde(rename = "x")]
    pub point: Vec<f64>,
    /// `∂f(x) ⊂ ∂g(x)`
    pub inclusion: bool,
    /// `∂f(x) ∩ ∂g(x) ≠ ∅`
    pub intersection: bool,
    /// `∂f(x) = ∂g(x)`
    pub equality: bool,
}

pub fn check_exact_subdiff(
    f: &MaxAffine,
    g: &MaxAffine,
    grid: &PointSet,
) -> Result<Vec<SubdiffComparison>> {
    let dim = check_pair_dims(f, g)?;
    if grid.dim() != dim {
        return Err(Error::Input("grid dimension mismatch".into()));
    }
    let origin = ModulusSet::origin();
    let mut out = Vec::with_capacity(grid.len());
    for x in grid.points() {
        let a = eps_subdiff(f, x, 0.0)?;
        let b = eps_subdiff(g, x, 0.0)?;
        let inclusion = included_in_sum(&a, &b, &origin)?.holds();
        let intersection = intersects(&a, &b, &origin)?.is_some();
        let equality = inclusion && included_in_sum(&b, &a, &origin)?.holds();
        out.push(SubdiffComparison { point: x.clone(), inclusion, intersection, equality });
    }
    Ok(out)
}

/// Whether `∂εf(x) ⊂ ∂εg(x)` for every tested ε. When it holds at all
/// ε > 0, this inclusion characterizes `x` as a global minimizer of
/// `g − f` (note the order: the inclusion of the subdifferentials of `f`
/// into those of `g` pins the minimality of `g − f`, not of `f − g`).
pub fn check_global_min(
    f: &MaxAffine,
    g: &MaxAffine,
    x: &[f64],
    eps_grid: &[f64],
) -> Result<bool> {
    check_pair_dims(f, g)?;
    if eps_grid.is_empty() {
        return Err(Error::Input("eps grid must be nonempty".into()));
    }
    let origin = ModulusSet::origin();
    for &eps in eps_grid {
        let a = eps_subdiff(f, x, eps)?;
        let b = eps_subdiff(g, x, eps)?;
        if !included_in_sum(&a, &b, &origin)?.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::Piece;

    fn abs_1d() -> MaxAffine {
        MaxAffine::new(1, vec![Piece::new(vec![1.0], 0.0), Piece::new(vec![-1.0], 0.0)]).unwrap()
    }

    fn zero_1d() -> MaxAffine {
        MaxAffine::new(1, vec![Piece::new(vec![0.0], 0.0)]).unwrap()
    }

    fn grid_1d(xs: &[f64]) -> PointSet {
        PointSet::new(1, xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    fn ball(k: f64) -> ModulusSpec {
        ModulusSpec::ball(k, Norm::Linf).unwrap()
    }

    #[test]
    fn condition_examples_on_abs() {
        let f = abs_1d();
        let g = zero_1d();
        let r = check_condition(&f, &g, &ball(1.0), &[1.0], 0.5, Condition::Inclusion).unwrap();
        assert!(r.verdict);
        let r = check_condition(&f, &g, &ball(1.0), &[0.0], 1e-3, Condition::Distance).unwrap();
        assert!(r.verdict);
        assert!(r.value.unwrap().abs() < 1e-9);
        let r = check_condition(&f, &g, &ball(0.9), &[1.0], 1e-6, Condition::Intersection).unwrap();
        assert!(!r.verdict);
    }

    #[test]
    fn vi_with_function_modulus_is_unsupported() {
        let spec = ModulusSpec::function(abs_1d()).unwrap();
        let err =
            check_condition(&abs_1d(), &zero_1d(), &spec, &[0.0], 0.1, Condition::Distance)
                .unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn certify_abs_at_its_true_constant() {
        let report = certify_lipschitz(
            &abs_1d(),
            &zero_1d(),
            &ball(1.0),
            &grid_1d(&[-2.0, -1.0, 0.0, 1.0, 2.0]),
            &[1e-6, 1e-2, 0.5],
            &[Condition::Inclusion, Condition::Intersection, Condition::Distance],
        )
        .unwrap();
        assert_eq!(report.overall, Verdict::Certified);
        assert_eq!(report.results.len(), 5 * 3 * 3);
        assert!(report.refutation.is_none());
    }

    #[test]
    fn certify_refutes_below_the_constant() {
        let report = certify_lipschitz(
            &abs_1d(),
            &zero_1d(),
            &ball(0.5),
            &grid_1d(&[-2.0, -1.0, 0.0, 1.0, 2.0]),
            &[1e-6, 1e-2, 0.5],
            &[Condition::Inclusion, Condition::Intersection, Condition::Distance],
        )
        .unwrap();
        assert_eq!(report.overall, Verdict::Refuted);
        let r = report.refutation.expect("refuted reports carry a witness");
        // The recorded witness must itself fail re-checking.
        let again = check_condition(
            &abs_1d(),
            &zero_1d(),
            &ball(0.5),
            &r.point,
            r.epsilon.unwrap(),
            report.results.last().unwrap().condition,
        )
        .unwrap();
        assert!(!again.verdict);
    }

    #[test]
    fn identical_functions_certify_at_zero() {
        let f = MaxAffine::new(
            1,
            vec![Piece::new(vec![0.7], 0.2), Piece::new(vec![-0.4], 0.0)],
        )
        .unwrap();
        let report = certify_lipschitz(
            &f,
            &f,
            &ball(0.0),
            &grid_1d(&[-1.0, 0.0, 2.0]),
            &[1e-6, 0.1],
            &[Condition::Inclusion, Condition::Intersection, Condition::Distance],
        )
        .unwrap();
        assert_eq!(report.overall, Verdict::Certified);
    }

    #[test]
    fn empty_grid_is_inconclusive() {
        let report = certify_lipschitz(
            &abs_1d(),
            &zero_1d(),
            &ball(1.0),
            &PointSet::new(1, vec![]).unwrap(),
            &[0.1],
            &[Condition::Distance],
        )
        .unwrap();
        assert_eq!(report.overall, Verdict::Inconclusive);
    }

    #[test]
    fn exact_mode_overrides_sparse_grids() {
        // A grid that misses every kink cannot refute 0.5 on its own, but
        // the exact path must.
        let report = certify_lipschitz_exact(
            &abs_1d(),
            &zero_1d(),
            0.5,
            Norm::Linf,
            &grid_1d(&[0.0]),
            &[0.5],
            &[Condition::Intersection],
        )
        .unwrap();
        assert_eq!(report.overall, Verdict::Refuted);
        assert!(report.refutation.unwrap().epsilon.is_none());
        let report = certify_lipschitz_exact(
            &abs_1d(),
            &zero_1d(),
            1.0,
            Norm::Linf,
            &grid_1d(&[0.0]),
            &[0.5],
            &[Condition::Intersection],
        )
        .unwrap();
        assert_eq!(report.overall, Verdict::Certified);
    }

    #[test]
    fn min_lipschitz_examples() {
        let k = min_lipschitz(&abs_1d(), &zero_1d(), &grid_1d(&[-2.0, -1.0, 1.0, 2.0]), 0.0, Norm::Linf)
            .unwrap();
        assert!((k - 1.0).abs() < 1e-9);
        let k = min_lipschitz(&abs_1d(), &abs_1d(), &grid_1d(&[-1.0, 0.5]), 0.0, Norm::L1).unwrap();
        assert!(k.abs() < 1e-9);
        let steep =
            MaxAffine::new(1, vec![Piece::new(vec![2.0], 0.0), Piece::new(vec![-1.0], 0.0)]).unwrap();
        let k = min_lipschitz(&steep, &zero_1d(), &grid_1d(&[-1.0, 1.0]), 0.0, Norm::Linf).unwrap();
        assert!((k - 2.0).abs() < 1e-9);
    }

    #[test]
    fn chain_identical_functions_is_flat() {
        let spec = ModulusSpec::function(zero_1d()).unwrap();
        let cert =
            chain_certificate(&abs_1d(), &abs_1d(), &spec, &[-1.0], &[1.0], 10, 0.1).unwrap();
        assert!(cert.feasible);
        assert_eq!(cert.actual_value, 0.0);
        assert!(cert.actual_value >= cert.bound_value.unwrap() - 1e-7);
        for t in &cert.triples {
            for k in 0..1 {
                assert!((t.u[k] - t.v[k] - t.w[k]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn chain_abs_with_unit_ball() {
        let cert =
            chain_certificate(&abs_1d(), &zero_1d(), &ball(1.0), &[0.0], &[2.0], 100, 0.01)
                .unwrap();
        assert!(cert.feasible);
        assert!((cert.actual_value - 2.0).abs() < 1e-12);
        assert!(cert.actual_value >= cert.bound_value.unwrap() - 1e-7);
        assert_eq!(cert.chain_points.len(), 101);
        assert_eq!(cert.triples.len(), 99);
    }

    #[test]
    fn chain_refutes_zero_modulus_for_nonconstant_difference() {
        let spec = ModulusSpec::function(zero_1d()).unwrap();
        let cert =
            chain_certificate(&abs_1d(), &zero_1d(), &spec, &[0.0], &[2.0], 10, 1e-6).unwrap();
        assert!(!cert.feasible);
        let i = cert.failure_index.expect("infeasible chains name the failing index");
        assert!(cert.chain_points[i][0] > 0.0);
        assert!(cert.bound_value.is_none());
    }

    #[test]
    fn chain_zero_length_convention() {
        let cert = chain_certificate(&abs_1d(), &zero_1d(), &ball(0.0), &[1.0], &[1.0], 5, 0.2)
            .unwrap();
        assert!(cert.feasible);
        assert_eq!(cert.actual_value, 0.0);
        let expected = -2.0 * 0.2 - 2.0 * 4.0 / 5.0 * (1.0 / 10.0) * 0.2;
        assert!((cert.bound_value.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn chain_input_validation() {
        assert!(matches!(
            chain_certificate(&abs_1d(), &zero_1d(), &ball(1.0), &[0.0], &[1.0], 0, 0.1),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            chain_certificate(&abs_1d(), &zero_1d(), &ball(1.0), &[0.0], &[1.0], 3, 0.0),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn constancy_detects_shifts() {
        let f = MaxAffine::new(
            1,
            vec![Piece::new(vec![1.0], 0.3), Piece::new(vec![-0.5], -0.2)],
        )
        .unwrap();
        let g = f.shifted(3.0);
        let grid = grid_1d(&[-2.0, -0.5, 0.1, 1.7]);
        let r = check_constancy(&f, &g, &grid, &[1e-6, 0.1], 1e-8, Norm::Linf).unwrap();
        assert!(r.constant);
        assert!((r.c.unwrap() + 3.0).abs() < 1e-12);
        assert_eq!(r.values_agree, Some(true));

        let r = check_constancy(&abs_1d(), &zero_1d(), &grid, &[1e-6], 1e-8, Norm::Linf).unwrap();
        assert!(!r.constant);
        assert!(r.c.is_none());

        let r = check_constancy(&f, &f, &grid, &[1e-6, 0.1], 1e-8, Norm::Linf).unwrap();
        assert!(r.constant);
        assert_eq!(r.c, Some(0.0));
    }

    #[test]
    fn exact_subdiff_comparisons() {
        let grid = grid_1d(&[-1.0, 0.0, 1.0]);
        for cmp in check_exact_subdiff(&abs_1d(), &abs_1d(), &grid).unwrap() {
            assert!(cmp.inclusion && cmp.intersection && cmp.equality);
        }
        let at_one = &check_exact_subdiff(&abs_1d(), &zero_1d(), &grid_1d(&[1.0])).unwrap()[0];
        assert!(!at_one.inclusion && !at_one.intersection && !at_one.equality);
        let half = MaxAffine::new(
            1,
            vec![Piece::new(vec![0.5], 0.0), Piece::new(vec![-0.5], 0.0)],
        )
        .unwrap();
        let at_zero = &check_exact_subdiff(&abs_1d(), &half, &grid_1d(&[0.0])).unwrap()[0];
        assert!(!at_zero.inclusion);
        assert!(at_zero.intersection);
        assert!(!at_zero.equality);
    }

    #[test]
    fn global_min_inclusion_direction() {
        let eps = [1e-6, 1e-3, 0.1, 1.0];
        // ∂ε|·|(0) = [−1,1] is not inside {0}: the inclusion fails even
        // though 0 minimizes |x| − 0; the predicate tracks minima of g − f.
        assert!(!check_global_min(&abs_1d(), &zero_1d(), &[0.0], &eps).unwrap());
        assert!(check_global_min(&abs_1d(), &abs_1d(), &[0.7], &eps).unwrap());
        assert!(check_global_min(&zero_1d(), &abs_1d(), &[0.0], &eps).unwrap());
    }

    #[test]
    fn report_json_field_order() {
        let report = certify_lipschitz(
            &abs_1d(),
            &zero_1d(),
            &ball(1.0),
            &grid_1d(&[1.0]),
            &[0.5],
            &[Condition::Distance],
        )
        .unwrap();
        let json = report.to_json();
        assert!(json.starts_with(r#"{"overall":"Certified","results":[{"condition":"VI","x":[1.0],"epsilon":0.5,"verdict":true,"#), "json was: {json}");
        assert!(json.ends_with(r#""refutation":null}"#));
    }
}
