//! Self-contained dense linear-programming kernel.
//!
//! Every geometric and certification query in this crate reduces to a small
//! dense LP, and this two-phase simplex is the single solver behind all of
//! them. Problems are stated as
//!
//! ```text
//! minimize  ⟨c, z⟩   subject to   A z = b,   G z ≤ g,   l ≤ z ≤ u
//! ```
//!
//! with optional per-variable bounds. Internally the problem is rewritten in
//! standard form (nonnegative variables, equality rows) by shifting,
//! mirroring or splitting each variable; phase 1 minimizes artificial
//! infeasibility, phase 2 the true objective. Pricing is Dantzig's rule,
//! falling back to Bland's rule once the objective stalls, which guarantees
//! termination on degenerate instances. The solver is deterministic:
//! identical inputs produce bitwise-identical outputs.

use crate::error::{Error, Result};

/// Base feasibility/optimality tolerance. Applied as
/// `FEAS_TOL · (1 + ‖b‖∞ + ‖g‖∞)` to constraint residuals.
pub const FEAS_TOL: f64 = 1e-9;

/// Tableau entries below this magnitude are never used as pivots.
const PIVOT_TOL: f64 = 1e-10;

/// Reduced costs above `-COST_TOL` are treated as optimal.
const COST_TOL: f64 = 1e-9;

/// A dense LP. Rows of `eq_lhs`/`ineq_lhs` must have length `num_vars`;
/// `lower[j]`/`upper[j]` of `None` mean unbounded on that side.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq_lhs: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ineq_lhs: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            objective: vec![0.0; num_vars],
            eq_lhs: Vec::new(),
            eq_rhs: Vec::new(),
            ineq_lhs: Vec::new(),
            ineq_rhs: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        let check_len = |name: &str, len: usize, want: usize| -> Result<()> {
            if len != want {
                return Err(Error::Input(format!("lp: {name} has length {len}, expected {want}")));
            }
            Ok(())
        };
        check_len("objective", self.objective.len(), n)?;
        check_len("lower", self.lower.len(), n)?;
        check_len("upper", self.upper.len(), n)?;
        check_len("eq_rhs", self.eq_rhs.len(), self.eq_lhs.len())?;
        check_len("ineq_rhs", self.ineq_rhs.len(), self.ineq_lhs.len())?;
        for (i, row) in self.eq_lhs.iter().enumerate() {
            check_len(&format!("eq_lhs[{i}]"), row.len(), n)?;
        }
        for (i, row) in self.ineq_lhs.iter().enumerate() {
            check_len(&format!("ineq_lhs[{i}]"), row.len(), n)?;
        }
        let all_finite = self
            .objective
            .iter()
            .chain(self.eq_rhs.iter())
            .chain(self.ineq_rhs.iter())
            .chain(self.eq_lhs.iter().flatten())
            .chain(self.ineq_lhs.iter().flatten())
            .all(|v| v.is_finite())
            && self
                .lower
                .iter()
                .chain(self.upper.iter())
                .flatten()
                .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Input("lp: non-finite coefficient".into()));
        }
        Ok(())
    }
}

/// Incremental construction of an [`LpProblem`] from sparse rows.
#[derive(Clone, Debug, Default)]
pub struct LpBuilder {
    num_vars: usize,
    objective: Vec<f64>,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
    eq: Vec<(Vec<(usize, f64)>, f64)>,
    ineq: Vec<(Vec<(usize, f64)>, f64)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, lower: Option<f64>, upper: Option<f64>) -> usize {
        self.num_vars += 1;
        self.objective.push(0.0);
        self.lower.push(lower);
        self.upper.push(upper);
        self.num_vars - 1
    }

    pub fn add_vars(
        &mut self,
        count: usize,
        lower: Option<f64>,
        upper: Option<f64>,
    ) -> std::ops::Range<usize> {
        let start = self.num_vars;
        for _ in 0..count {
            self.add_var(lower, upper);
        }
        start..self.num_vars
    }

    /// Adds `coeff` to the (minimized) objective coefficient of `var`.
    pub fn objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] += coeff;
    }

    pub fn add_eq(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.eq.push((terms, rhs));
    }

    pub fn add_leq(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.ineq.push((terms, rhs));
    }

    pub fn add_geq(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        let flipped = terms.into_iter().map(|(j, c)| (j, -c)).collect();
        self.ineq.push((flipped, -rhs));
    }

    pub fn build(self) -> LpProblem {
        let n = self.num_vars;
        let densify = |rows: Vec<(Vec<(usize, f64)>, f64)>| {
            let mut lhs = Vec::with_capacity(rows.len());
            let mut rhs = Vec::with_capacity(rows.len());
            for (terms, b) in rows {
                let mut row = vec![0.0; n];
                for (j, c) in terms {
                    row[j] += c;
                }
                lhs.push(row);
                rhs.push(b);
            }
            (lhs, rhs)
        };
        let (eq_lhs, eq_rhs) = densify(self.eq);
        let (ineq_lhs, ineq_rhs) = densify(self.ineq);
        LpProblem {
            num_vars: n,
            objective: self.objective,
            eq_lhs,
            eq_rhs,
            ineq_lhs,
            ineq_rhs,
            lower: self.lower,
            upper: self.upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. The point and objective exist only at optimality.
#[derive(Clone, Debug, PartialEq)]
pub enum LpSolution {
    Optimal { z: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible => LpStatus::Infeasible,
            LpSolution::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpSolution::Optimal { z, objective } => Some((z, *objective)),
            _ => None,
        }
    }

    /// The optimal point, or an error when the caller's construction
    /// guarantees feasibility and boundedness.
    pub fn expect_optimal(&self, what: &str) -> Result<(&[f64], f64)> {
        self.optimal()
            .ok_or_else(|| Error::Numerical(format!("{what}: expected an optimal LP, got {:?}", self.status())))
    }
}

/// How each original variable maps into the nonnegative standard form.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// `z = offset + s`
    Shift { col: usize, offset: f64 },
    /// `z = offset − s`
    Mirror { col: usize, offset: f64 },
    /// `z = s⁺ − s⁻`
    Split { pos: usize, neg: usize },
}

const NO_BASIS: usize = usize::MAX;

struct Tableau {
    /// Row-major constraint rows over the real (non-artificial) columns.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Basic column of each row; `NO_BASIS` marks an implicit artificial.
    basis: Vec<usize>,
    ncols: usize,
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize, z: &mut [f64], val: &mut f64) {
        let theta = self.rhs[r] / self.rows[r][e];
        *val += z[e] * theta;
        let inv = 1.0 / self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        self.rhs[r] = theta;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for i in 0..self.rows.len() {
            if i == r || self.rows[i].is_empty() {
                continue;
            }
            let f = self.rows[i][e];
            if f != 0.0 {
                for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                self.rows[i][e] = 0.0;
                self.rhs[i] -= f * self.rhs[r];
            }
        }
        let f = z[e];
        if f != 0.0 {
            for (v, p) in z.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            z[e] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Entering column under Dantzig (most negative reduced cost) or Bland
    /// (lowest eligible index) pricing. Ties go to the lowest index.
    fn entering(&self, z: &[f64], bland: bool) -> Option<usize> {
        if bland {
            return z[..self.ncols].iter().position(|&c| c < -COST_TOL);
        }
        let mut best: Option<(usize, f64)> = None;
        for (j, &c) in z[..self.ncols].iter().enumerate() {
            if c < -COST_TOL && best.is_none_or(|(_, bc)| c < bc) {
                best = Some((j, c));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Minimum-ratio row for entering column `e`; ties broken by the lowest
    /// basic index (artificials, marked `NO_BASIS`, leave first).
    fn leaving(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][e];
            if a > PIVOT_TOL {
                let ratio = self.rhs[i] / a;
                match best {
                    None => best = Some((i, ratio)),
                    Some((bi, br)) => {
                        let tol = 1e-12 * (1.0 + br.abs());
                        let improves = ratio < br - tol;
                        let tie_wins =
                            ratio <= br + tol && self.tie_key(i) < self.tie_key(bi);
                        if improves || tie_wins {
                            best = Some((i, ratio));
                        }
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn tie_key(&self, row: usize) -> (usize, usize) {
        // Prefer to evict artificials, then the lowest basic column.
        if self.basis[row] == NO_BASIS {
            (0, row)
        } else {
            (1, self.basis[row])
        }
    }

    /// Runs the simplex loop on the current tableau until optimality,
    /// unboundedness, or budget exhaustion.
    fn run(&mut self, z: &mut [f64], val: &mut f64, budget: &mut usize) -> Result<RunOutcome> {
        let size = self.ncols + self.rows.len();
        let stall_limit = (10 * size).clamp(8, 1000);
        let mut bland = false;
        let mut stall = 0usize;
        let mut best_val = *val;
        loop {
            let Some(e) = self.entering(z, bland) else {
                return Ok(RunOutcome::Optimal);
            };
            let Some(r) = self.leaving(e) else {
                return Ok(RunOutcome::Unbounded);
            };
            if *budget == 0 {
                return Err(Error::Numerical("lp: simplex iteration cap exceeded".into()));
            }
            *budget -= 1;
            self.pivot(r, e, z, val);
            if *val < best_val - 1e-12 * (1.0 + best_val.abs()) {
                best_val = *val;
                stall = 0;
            } else {
                stall += 1;
                if stall >= stall_limit {
                    bland = true;
                }
            }
        }
    }
}

/// Solves the problem by two-phase dense simplex.
///
/// At optimality the returned point satisfies every constraint within
/// `FEAS_TOL · (1 + ‖b‖∞ + ‖g‖∞)`. The iteration budget is
/// `50 · (#columns + #rows)` of the internal standard form.
pub fn solve(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;

    let rhs_scale = p
        .eq_rhs
        .iter()
        .chain(&p.ineq_rhs)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let feas_tol = FEAS_TOL * (1.0 + rhs_scale);

    // Standard-form variable mapping.
    let mut maps = Vec::with_capacity(p.num_vars);
    let mut ncols = 0usize;
    let mut range_rows: Vec<(usize, f64)> = Vec::new(); // (col, width) for two-sided bounds
    for j in 0..p.num_vars {
        match (p.lower[j], p.upper[j]) {
            (Some(l), Some(u)) => {
                if u < l {
                    return Ok(LpSolution::Infeasible);
                }
                maps.push(VarMap::Shift { col: ncols, offset: l });
                range_rows.push((ncols, u - l));
                ncols += 1;
            }
            (Some(l), None) => {
                maps.push(VarMap::Shift { col: ncols, offset: l });
                ncols += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap::Mirror { col: ncols, offset: u });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
    }
    let struct_cols = ncols;
    let num_ineq = p.ineq_lhs.len() + range_rows.len();
    ncols += num_ineq; // one slack per inequality row
    let nrows = p.eq_lhs.len() + num_ineq;

    let mut tab = Tableau {
        rows: Vec::with_capacity(nrows),
        rhs: Vec::with_capacity(nrows),
        basis: vec![NO_BASIS; nrows],
        ncols,
    };

    // Substitute the variable mapping into one original row.
    let subst = |lhs: &[f64], b: f64| -> (Vec<f64>, f64) {
        let mut row = vec![0.0; ncols];
        let mut rhs = b;
        for (j, &c) in lhs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    row[col] += c;
                    rhs -= c * offset;
                }
                VarMap::Mirror { col, offset } => {
                    row[col] -= c;
                    rhs -= c * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += c;
                    row[neg] -= c;
                }
            }
        }
        (row, rhs)
    };

    for (lhs, &b) in p.eq_lhs.iter().zip(&p.eq_rhs) {
        let (row, rhs) = subst(lhs, b);
        tab.rows.push(row);
        tab.rhs.push(rhs);
    }
    let mut slack = struct_cols;
    for (lhs, &b) in p.ineq_lhs.iter().zip(&p.ineq_rhs) {
        let (mut row, rhs) = subst(lhs, b);
        row[slack] = 1.0;
        tab.rows.push(row);
        tab.rhs.push(rhs);
        slack += 1;
    }
    for &(col, width) in &range_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        row[slack] = 1.0;
        tab.rows.push(row);
        tab.rhs.push(width);
        slack += 1;
    }

    // Orient rows to a nonnegative right-hand side and pick the initial
    // basis: a +1 slack where available, an implicit artificial otherwise.
    let mut need_phase1 = false;
    for i in 0..nrows {
        if tab.rhs[i] < 0.0 {
            for v in tab.rows[i].iter_mut() {
                *v = -*v;
            }
            tab.rhs[i] = -tab.rhs[i];
        }
        let slack_col = if i >= p.eq_lhs.len() { Some(struct_cols + (i - p.eq_lhs.len())) } else { None };
        match slack_col {
            Some(s) if tab.rows[i][s] == 1.0 => tab.basis[i] = s,
            _ => need_phase1 = true,
        }
    }

    let mut budget = 50 * (ncols + nrows).max(1);

    if need_phase1 {
        // Phase-1 objective: total artificial value. Reduced costs over the
        // real columns are the negated column sums of the artificial rows.
        let mut z1 = vec![0.0; ncols];
        let mut val1 = 0.0;
        for i in 0..nrows {
            if tab.basis[i] == NO_BASIS {
                for (zj, &a) in z1.iter_mut().zip(&tab.rows[i]) {
                    *zj -= a;
                }
                val1 += tab.rhs[i];
            }
        }
        match tab.run(&mut z1, &mut val1, &mut budget)? {
            RunOutcome::Optimal => {}
            RunOutcome::Unbounded => {
                return Err(Error::Numerical("lp: phase-1 objective unbounded".into()));
            }
        }
        if val1 > feas_tol {
            return Ok(LpSolution::Infeasible);
        }
        // Evict artificials still in the basis; rows with no usable real
        // entry are redundant and dropped. Their values are ≤ val1 ≤ tol,
        // so clamping them to zero keeps the eviction pivots degenerate.
        let mut drop_rows = Vec::new();
        for i in 0..nrows {
            if tab.basis[i] != NO_BASIS {
                continue;
            }
            if tab.rhs[i].abs() <= feas_tol {
                tab.rhs[i] = 0.0;
            }
            let mut pick: Option<usize> = None;
            for j in 0..ncols {
                let a = tab.rows[i][j].abs();
                if a > 1e-7 && pick.is_none_or(|pj| a > tab.rows[i][pj].abs()) {
                    pick = Some(j);
                }
            }
            match pick {
                Some(j) => {
                    let mut zdummy = vec![0.0; ncols];
                    let mut vdummy = 0.0;
                    tab.pivot(i, j, &mut zdummy, &mut vdummy);
                }
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            tab.rows.remove(i);
            tab.rhs.remove(i);
            tab.basis.remove(i);
        }
    }

    // Phase 2: the real objective over standard-form columns. The constant
    // part from bound offsets is irrelevant to pivoting; the reported
    // objective is recomputed as ⟨c, z⟩ at the end.
    let mut cost = vec![0.0; ncols];
    for (j, &c) in p.objective.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        match maps[j] {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    let mut z2 = cost.clone();
    let mut val2 = 0.0;
    for i in 0..tab.rows.len() {
        let b = tab.basis[i];
        debug_assert!(b != NO_BASIS);
        if z2[b] != 0.0 {
            let f = z2[b];
            val2 += f * tab.rhs[i];
            let row = &tab.rows[i];
            for (zj, &a) in z2.iter_mut().zip(row) {
                *zj -= f * a;
            }
            z2[b] = 0.0;
        }
    }
    match tab.run(&mut z2, &mut val2, &mut budget)? {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return Ok(LpSolution::Unbounded),
    }

    // Recover the original variables.
    let mut s = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        s[b] = tab.rhs[i];
    }
    let mut zvec = vec![0.0; p.num_vars];
    for (j, m) in maps.iter().enumerate() {
        zvec[j] = match *m {
            VarMap::Shift { col, offset } => offset + s[col],
            VarMap::Mirror { col, offset } => offset - s[col],
            VarMap::Split { pos, neg } => s[pos] - s[neg],
        };
    }
    let objective = crate::funcrep::dot(&p.objective, &zvec);
    Ok(LpSolution::Optimal { z: zvec, objective })
}
