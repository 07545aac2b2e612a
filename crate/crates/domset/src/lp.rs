//! Linear programs over `[0,1]`-bounded variables and a small deterministic
//! solver for them.
//!
//! The solver is a two-phase primal simplex on the bounded-variable form
//! with Bland's anti-cycling pivot rule and a dense tableau. Instances at
//! this scale have at most a few thousand rows and columns, and a built-in
//! solver keeps outcomes reproducible: two calls on equal models return
//! bit-identical results.

use thiserror::Error;

use crate::instance::{BipartiteInstance, NodeId};
use std::collections::BTreeSet;

/// Feasibility and optimality tolerance.
pub const FEAS_TOL: f64 = 1e-7;
/// Pivot magnitude threshold.
const PIV_TOL: f64 = 1e-9;
const INF: f64 = f64::INFINITY;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    /// `(column, coefficient)` pairs, referencing existing columns only.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear program `min c·x` subject to rows and `0 ≤ x ≤ 1` for every
/// variable. `columns[k]` records which UB node variable `k` stands for.
#[derive(Clone, Debug, PartialEq)]
pub struct LpModel {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub columns: Vec<NodeId>,
}

impl LpModel {
    pub fn column_of(&self, node: NodeId) -> Option<usize> {
        self.columns.binary_search(&node).ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("lp contract violation: {0}")]
    Contract(String),
    #[error("lp numerical failure: {0}")]
    Numerical(String),
}

/// The fractional covering relaxation: minimize the number of chosen UB
/// nodes subject to every UD node seeing total weight at least 1.
///
/// Every UD node must have degree ≥ 1; callers detect degree-0 UD nodes as
/// infeasibility before building a model.
pub fn build_relaxation(h: &BipartiteInstance) -> Result<LpModel, LpError> {
    let columns: Vec<NodeId> = h.ub().iter().copied().collect();
    let mut rows = Vec::with_capacity(h.ud().len());
    for &u in h.ud() {
        if h.degree(u) == 0 {
            return Err(LpError::Contract(format!(
                "UD node {u} has no dominator; instance is infeasible"
            )));
        }
        let coeffs = h
            .neighbors(u)
            .iter()
            .map(|&v| {
                let col = columns.binary_search(&v).expect("neighbor is a UB node");
                (col, 1.0)
            })
            .collect();
        rows.push(LpRow { coeffs, relation: Relation::Ge, rhs: 1.0 });
    }
    Ok(LpModel {
        num_vars: columns.len(),
        objective: vec![1.0; columns.len()],
        rows,
        columns,
    })
}

/// The `j`-th program of the cascade (`j` is 1-based): minimize the weight
/// of group `j` subject to the covering rows, the total-weight equality
/// `Σ x = ceil_sol`, and one cut `Σ_{A_i} x ≥ prior_opts[i]` per earlier
/// group.
pub fn build_partition_lp(
    h: &BipartiteInstance,
    groups: &[BTreeSet<NodeId>],
    j: usize,
    ceil_sol: usize,
    prior_opts: &[usize],
) -> Result<LpModel, LpError> {
    if j == 0 || j > groups.len() {
        return Err(LpError::Contract(format!(
            "group index {j} out of range 1..={}",
            groups.len()
        )));
    }
    if prior_opts.len() != j - 1 {
        return Err(LpError::Contract(format!(
            "expected {} prior optima, got {}",
            j - 1,
            prior_opts.len()
        )));
    }
    let mut model = build_relaxation(h)?;
    model.objective = model
        .columns
        .iter()
        .map(|v| if groups[j - 1].contains(v) { 1.0 } else { 0.0 })
        .collect();
    model.rows.push(LpRow {
        coeffs: (0..model.num_vars).map(|k| (k, 1.0)).collect(),
        relation: Relation::Eq,
        rhs: ceil_sol as f64,
    });
    for (i, &opt) in prior_opts.iter().enumerate() {
        let coeffs = model
            .columns
            .iter()
            .enumerate()
            .filter(|(_, v)| groups[i].contains(v))
            .map(|(k, _)| (k, 1.0))
            .collect();
        model.rows.push(LpRow { coeffs, relation: Relation::Ge, rhs: opt as f64 });
    }
    Ok(model)
}

/// Solves the model. Deterministic: no randomized pivoting, so equal models
/// produce identical outcomes. Numerical trouble is reported as an error,
/// never as a wrong status.
pub fn solve_lp(model: &LpModel) -> Result<LpOutcome, LpError> {
    for row in &model.rows {
        if row.coeffs.iter().any(|&(c, _)| c >= model.num_vars) {
            return Err(LpError::Contract("row references a missing column".into()));
        }
    }
    let mut simplex = Simplex::build(model);
    if !simplex.phase_one()? {
        return Ok(LpOutcome::Infeasible);
    }
    simplex.phase_two(model)?;
    let point = simplex.structural_point();
    for (k, &x) in point.iter().enumerate() {
        if !(-FEAS_TOL..=1.0 + FEAS_TOL).contains(&x) {
            return Err(LpError::Numerical(format!("variable {k} out of bounds: {x}")));
        }
    }
    for (i, row) in model.rows.iter().enumerate() {
        let lhs: f64 = row.coeffs.iter().map(|&(c, a)| a * point[c]).sum();
        let violated = match row.relation {
            Relation::Ge => lhs < row.rhs - FEAS_TOL,
            Relation::Eq => (lhs - row.rhs).abs() > FEAS_TOL,
        };
        if violated {
            return Err(LpError::Numerical(format!(
                "row {i} violated at the reported point: {lhs} vs {}",
                row.rhs
            )));
        }
    }
    let value = model
        .objective
        .iter()
        .zip(&point)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpOutcome::Optimal { value, point })
}

struct Simplex {
    m: usize,
    ncols: usize,
    n_struct: usize,
    art_start: usize,
    tab: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    upper: Vec<f64>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
}

impl Simplex {
    fn build(model: &LpModel) -> Simplex {
        let m = model.rows.len();
        let n = model.num_vars;
        let n_surplus = model
            .rows
            .iter()
            .filter(|r| r.relation == Relation::Ge)
            .count();
        let ncols = n + n_surplus + m;
        let art_start = n + n_surplus;
        let mut tab = vec![vec![0.0; ncols]; m];
        let mut rhs = vec![0.0; m];
        let mut surplus = n;
        for (i, row) in model.rows.iter().enumerate() {
            for &(c, a) in &row.coeffs {
                tab[i][c] += a;
            }
            if row.relation == Relation::Ge {
                tab[i][surplus] = -1.0;
                surplus += 1;
            }
            rhs[i] = row.rhs;
            if rhs[i] < 0.0 {
                for v in tab[i].iter_mut() {
                    *v = -*v;
                }
                rhs[i] = -rhs[i];
            }
            tab[i][art_start + i] = 1.0;
        }
        let mut upper = vec![INF; ncols];
        upper[..n].fill(1.0);
        let mut is_basic = vec![false; ncols];
        let basis: Vec<usize> = (0..m).map(|i| art_start + i).collect();
        for &b in &basis {
            is_basic[b] = true;
        }
        Simplex {
            m,
            ncols,
            n_struct: n,
            art_start,
            tab,
            rhs,
            basis,
            upper,
            is_basic,
            at_upper: vec![false; ncols],
        }
    }

    /// Values of the basic variables given the nonbasic bound assignment.
    fn beta(&self) -> Vec<f64> {
        let mut beta = self.rhs.clone();
        for j in 0..self.ncols {
            if !self.is_basic[j] && self.at_upper[j] && self.upper[j] > 0.0 {
                let u = self.upper[j];
                for i in 0..self.m {
                    beta[i] -= self.tab[i][j] * u;
                }
            }
        }
        beta
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<(), LpError> {
        let max_iters = 50_000 + 200 * (self.m + self.ncols);
        for _ in 0..max_iters {
            let beta = self.beta();
            let y: Vec<f64> = self.basis.iter().map(|&b| cost[b]).collect();
            // Bland: the entering variable is the lowest-index improving one.
            let mut entering = None;
            for j in 0..self.ncols {
                if self.is_basic[j] || self.upper[j] < PIV_TOL {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..self.m {
                    if y[i] != 0.0 {
                        d -= y[i] * self.tab[i][j];
                    }
                }
                let improving = if self.at_upper[j] { d > FEAS_TOL } else { d < -FEAS_TOL };
                if improving {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };
            // Ratio test: the entering variable moves by t away from its
            // bound; basics move at rate -alpha. Ties break toward the
            // smallest basic column index (Bland).
            let mut t_min = self.upper[q];
            let mut leaving: Option<(usize, bool)> = None; // (row, leaver goes to upper)
            for i in 0..self.m {
                let alpha = self.tab[i][q] * dir;
                let candidate = if alpha > PIV_TOL {
                    Some((beta[i].max(0.0) / alpha, false))
                } else if alpha < -PIV_TOL {
                    let ub = self.upper[self.basis[i]];
                    if ub.is_finite() {
                        Some((((ub - beta[i]).max(0.0)) / (-alpha), true))
                    } else {
                        None
                    }
                } else {
                    None
                };
                if let Some((t, to_upper)) = candidate {
                    let tie = (t - t_min).abs() <= PIV_TOL;
                    let better = t < t_min - PIV_TOL
                        || (tie
                            && match leaving {
                                Some((r, _)) => self.basis[i] < self.basis[r],
                                None => t < t_min,
                            });
                    if better {
                        t_min = t;
                        leaving = Some((i, to_upper));
                    }
                }
            }
            match leaving {
                None => {
                    if !t_min.is_finite() {
                        return Err(LpError::Numerical("unbounded improving direction".into()));
                    }
                    // Bound flip: the entering variable crosses to its other
                    // bound without a basis change.
                    self.at_upper[q] = !self.at_upper[q];
                }
                Some((r, to_upper)) => {
                    self.pivot(r, q, to_upper);
                }
            }
        }
        Err(LpError::Numerical("iteration limit exceeded".into()))
    }

    fn pivot(&mut self, r: usize, q: usize, leaver_to_upper: bool) {
        let piv = self.tab[r][q];
        debug_assert!(piv.abs() > PIV_TOL);
        for v in self.tab[r].iter_mut() {
            *v /= piv;
        }
        self.rhs[r] /= piv;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i][q];
            if f == 0.0 {
                continue;
            }
            for j in 0..self.ncols {
                let base = self.tab[r][j];
                if base != 0.0 {
                    self.tab[i][j] -= f * base;
                }
            }
            self.tab[i][q] = 0.0;
            self.rhs[i] -= f * self.rhs[r];
        }
        let leaver = self.basis[r];
        self.is_basic[leaver] = false;
        self.at_upper[leaver] = leaver_to_upper;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    /// Runs phase one; returns false when the model is infeasible.
    fn phase_one(&mut self) -> Result<bool, LpError> {
        let mut cost = vec![0.0; self.ncols];
        cost[self.art_start..].fill(1.0);
        self.optimize(&cost)?;
        let beta = self.beta();
        let residual: f64 = (0..self.m)
            .filter(|&i| self.basis[i] >= self.art_start)
            .map(|i| beta[i].max(0.0))
            .sum();
        if residual > FEAS_TOL {
            return Ok(false);
        }
        // Artificials are done: lock them at zero so they never re-enter.
        for j in self.art_start..self.ncols {
            self.upper[j] = 0.0;
        }
        Ok(true)
    }

    fn phase_two(&mut self, model: &LpModel) -> Result<(), LpError> {
        let mut cost = vec![0.0; self.ncols];
        cost[..self.n_struct].copy_from_slice(&model.objective);
        self.optimize(&cost)
    }

    fn structural_point(&self) -> Vec<f64> {
        let beta = self.beta();
        let mut point = vec![0.0; self.n_struct];
        for (k, x) in point.iter_mut().enumerate() {
            if self.is_basic[k] {
                let row = self.basis.iter().position(|&b| b == k).expect("basic column");
                *x = beta[row];
            } else if self.at_upper[k] {
                *x = self.upper[k];
            }
        }
        point
    }
}
