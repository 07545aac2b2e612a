//! Lower bounds for the covering optimum: the rounded LP relaxation value,
//! and a cascade of partition-restricted LPs that can certify one extra
//! unit. Infeasibility of any program in the cascade proves that no
//! integral solution matches the plain LP ceiling, because the indicator
//! vector of such a solution would satisfy every program in the chain.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::config::{DensityMetric, MultiLpConfig};
use crate::instance::{BipartiteInstance, NodeId};
use crate::lp::{self, LpError, LpOutcome};

/// Guard for rounding LP optima: exact integers never round up by noise.
pub const CEIL_EPS: f64 = 1e-6;

/// `ceil(x)` tolerant of values within [`CEIL_EPS`] above an integer.
pub fn ceil_eps(x: f64) -> usize {
    debug_assert!(x >= -CEIL_EPS, "ceil_eps on {x}");
    let v = (x - CEIL_EPS).ceil();
    if v <= 0.0 {
        0
    } else {
        v as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    /// Optimal value of the covering relaxation.
    pub sol: f64,
    /// Integer lower bound; either `ceil_eps(sol)` or one more.
    pub lb: usize,
    /// True iff the cascade raised the bound by one.
    pub tightened: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("bound contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Near-equal random partition of `UB` into `k` groups: with
/// `|UB| = p·k + q`, the first `k − q` groups have size `p` and the rest
/// `p + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFamily {
    pub groups: Vec<BTreeSet<NodeId>>,
}

impl PartitionFamily {
    pub fn k(&self) -> usize {
        self.groups.len()
    }
}

pub fn make_partition(
    ub: &BTreeSet<NodeId>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PartitionFamily, BoundError> {
    let n = ub.len();
    if k == 0 || k > n {
        return Err(BoundError::Contract(format!("k={k} out of range 1..={n}")));
    }
    let mut nodes: Vec<NodeId> = ub.iter().copied().collect();
    nodes.shuffle(rng);
    let p = n / k;
    let q = n % k;
    let mut groups = Vec::with_capacity(k);
    let mut cursor = 0;
    for i in 0..k {
        let size = if i < k - q { p } else { p + 1 };
        groups.push(nodes[cursor..cursor + size].iter().copied().collect());
        cursor += size;
    }
    debug_assert_eq!(cursor, n);
    Ok(PartitionFamily { groups })
}

/// The plain relaxation bound: solve the covering LP and round up.
pub fn base_bound(h: &BipartiteInstance) -> Result<BoundReport, BoundError> {
    let model = lp::build_relaxation(h)?;
    match lp::solve_lp(&model)? {
        LpOutcome::Optimal { value, .. } => Ok(BoundReport {
            sol: value,
            lb: ceil_eps(value),
            tightened: false,
        }),
        LpOutcome::Infeasible => Err(BoundError::Lp(LpError::Numerical(
            "covering relaxation reported infeasible despite positive UD degrees".into(),
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TightenRun {
    pub lb: usize,
    pub lp_calls: u64,
}

/// The cascade: partition UB into `k = ceil_sol` groups, then solve the
/// group programs in order, feeding each rounded optimum into the next
/// program's cuts. The first infeasible program certifies `ceil_sol + 1`;
/// if all are feasible the bound stays `ceil_sol`.
///
/// The programs must run sequentially: each one's cut rows depend on the
/// previous optima.
pub fn multi_lp(
    h: &BipartiteInstance,
    ceil_sol: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TightenRun, BoundError> {
    if ceil_sol == 0 || ceil_sol > h.ub().len() {
        return Ok(TightenRun { lb: ceil_sol, lp_calls: 0 });
    }
    let family = make_partition(h.ub(), ceil_sol, rng)?;
    let mut prior: Vec<usize> = Vec::with_capacity(family.k());
    let mut lp_calls = 0;
    for j in 1..=family.k() {
        let model = lp::build_partition_lp(h, &family.groups, j, ceil_sol, &prior)?;
        lp_calls += 1;
        match lp::solve_lp(&model)? {
            LpOutcome::Infeasible => {
                return Ok(TightenRun { lb: ceil_sol + 1, lp_calls });
            }
            LpOutcome::Optimal { value, .. } => prior.push(ceil_eps(value)),
        }
    }
    Ok(TightenRun { lb: ceil_sol, lp_calls })
}

/// The empirical gate for running the cascade. All four must hold:
/// `lb + r < q`, `sol + r > q − gap`, `n/k ≤ (m/n)²`, and `r ≥ min_r`,
/// with `k = lb`, `n = |UB|`, and `m` the edge count (or `|UD|`, by
/// configuration).
pub fn should_tighten(
    sol: f64,
    lb: usize,
    r: usize,
    q: usize,
    h: &BipartiteInstance,
    cfg: &MultiLpConfig,
) -> bool {
    if lb == 0 || h.ub().is_empty() {
        return false;
    }
    let n = h.ub().len() as f64;
    let m = match cfg.density_metric {
        DensityMetric::Edges => h.edge_count() as f64,
        DensityMetric::UdCount => h.ud().len() as f64,
    };
    lb + r < q
        && sol + r as f64 > q as f64 - cfg.gap
        && n / lb as f64 <= (m / n).powi(2)
        && r >= cfg.min_r
}
