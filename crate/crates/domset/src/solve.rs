//! The branch-and-bound driver.
//!
//! Each node first tries the bound prune `lb + r ≥ q` against the shared
//! incumbent, then applies at most one reduction rule and recurses, and
//! otherwise branches on a selected UB vertex: the include child drops the
//! vertex's closed neighborhood, the exclude child just the vertex. Child
//! relaxations are solved fresh at every branch node, optionally tightened
//! by the multi-LP cascade when the gate conditions hold.
//!
//! A search is strictly single-threaded: the incumbent is shared across the
//! whole tree and the cascade's programs depend on each other in order.

use std::collections::BTreeSet;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::SeedableRng;

use crate::bound::{self, BoundError};
use crate::branch;
use crate::config::{BranchStrategy, Config};
use crate::graph::Graph;
use crate::instance::{BipartiteInstance, InstanceError, NodeId, Origin};
use crate::lp::LpError;
use crate::reduce::{self, ReduceError, TraceEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Timeout,
    Infeasible,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    /// Vertex-selection (branch node) count.
    pub s_num: u64,
    pub lp_calls: u64,
    pub multilp_calls: u64,
    pub multilp_tightened: u64,
    pub rule_fires: [u64; 9],
    pub nodes_pruned_by_bound: u64,
    pub ldpb_fallbacks: u64,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Solution in original ids: graph vertices for MDS, root instance
    /// node ids for PDS. Absent on infeasible instances and on timeouts
    /// with no incumbent.
    pub solution: Option<BTreeSet<usize>>,
    pub stats: SearchStats,
}

impl SolveResult {
    pub fn size(&self) -> Option<usize> {
        self.solution.as_ref().map(BTreeSet::len)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("solver internal error: {0}")]
    Internal(String),
}

enum Abort {
    Timeout,
    Failed(SolveError),
}

impl<E: Into<SolveError>> From<E> for Abort {
    fn from(e: E) -> Self {
        Abort::Failed(e.into())
    }
}

enum NodeOutcome {
    Solution(BTreeSet<NodeId>),
    NoImprovement,
}

const BRANCH_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const BOUND_SALT: u64 = 0x2545_f491_4f6c_dd1d;

struct Ctx<'a> {
    /// Incumbent size; never increases.
    q: usize,
    /// Best solution found, in root coordinates.
    best: Option<BTreeSet<NodeId>>,
    cfg: &'a Config,
    stats: SearchStats,
    deadline: Option<Instant>,
}

impl Ctx<'_> {
    /// Per-node rng derived from the seed and the instance shape, so that
    /// identical subproblems draw identically regardless of visit order or
    /// of how many draws other parts of the search consumed. This keeps
    /// branching decisions aligned between runs that differ only in bound
    /// tightening.
    fn node_rng(&self, salt: u64, h: &BipartiteInstance) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ salt ^ fingerprint(h))
    }
}

fn fingerprint(h: &BipartiteInstance) -> u64 {
    let mut acc: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        acc ^= x;
        acc = acc.wrapping_mul(0x100_0000_01b3);
    };
    for &v in h.ub() {
        eat(v as u64);
        for &w in h.neighbors(v) {
            eat(w as u64 | 0x8000_0000_0000_0000);
        }
    }
    eat(0x55aa);
    for &v in h.ud() {
        eat(v as u64);
    }
    acc
}

fn search(
    h: &BipartiteInstance,
    lb: usize,
    r: usize,
    ctx: &mut Ctx,
    trace: &mut Vec<TraceEntry>,
) -> Result<NodeOutcome, Abort> {
    if let Some(deadline) = ctx.deadline {
        if Instant::now() >= deadline {
            return Err(Abort::Timeout);
        }
    }
    if lb + r >= ctx.q {
        ctx.stats.nodes_pruned_by_bound += 1;
        return Ok(NodeOutcome::NoImprovement);
    }
    if h.ud().is_empty() {
        return Ok(NodeOutcome::Solution(BTreeSet::new()));
    }
    debug_assert!(!h.has_undominatable_node(), "caller admits only feasible instances");

    // Reduction phase: one rule per recursion level.
    if let Some(m) = reduce::find_rule(h, &ctx.cfg.rules) {
        ctx.stats.rule_fires[(m.rule - 1) as usize] += 1;
        if m.rule == 7 {
            return Ok(NodeOutcome::Solution(reduce::rule7_solve(h)?));
        }
        let (reduced, entry, delta) = reduce::apply_rule(h, &m)?;
        // The child's optimum is exactly delta below this node's, so the
        // shifted bound stays valid without another LP here.
        let child_lb = lb.saturating_sub(delta);
        trace.push(entry.clone());
        let child = search(&reduced, child_lb, r + delta, ctx, trace);
        trace.pop();
        return match child? {
            NodeOutcome::NoImprovement => Ok(NodeOutcome::NoImprovement),
            NodeOutcome::Solution(mut sol) => {
                reduce::unwind_entry(&entry, &mut sol);
                Ok(NodeOutcome::Solution(sol))
            }
        };
    }

    // Branch.
    ctx.stats.s_num += 1;
    let s = match ctx.cfg.branching.strategy {
        BranchStrategy::Ldpb => {
            let mut rng = ctx.node_rng(BRANCH_SALT, h);
            let sel = branch::ldpb_select(h, &mut rng);
            if sel.used_fallback {
                ctx.stats.ldpb_fallbacks += 1;
            }
            sel.node
        }
        BranchStrategy::Maxdeg => branch::maxdeg_select(h),
    };
    let include = h.delete_closed(s)?;
    let exclude = h.delete_node(s)?;

    let include_lb = child_bound(&include, r, ctx)?;
    // Excluding s may strand a UD node; that child dies without an LP call.
    let exclude_lb = if exclude.has_undominatable_node() {
        None
    } else {
        Some(child_bound(&exclude, r, ctx)?)
    };

    trace.push(TraceEntry::Branch { s, included: true });
    let taken = search(&include, include_lb, r + 1, ctx, trace);
    trace.pop();
    let sol_taken = match taken? {
        NodeOutcome::Solution(mut sol) => {
            sol.insert(s);
            Some(sol)
        }
        NodeOutcome::NoImprovement => None,
    };

    let sol_dropped = match exclude_lb {
        None => None,
        Some(exclude_lb) => {
            trace.push(TraceEntry::Branch { s, included: false });
            let dropped = search(&exclude, exclude_lb, r, ctx, trace);
            trace.pop();
            match dropped? {
                NodeOutcome::Solution(sol) => Some(sol),
                NodeOutcome::NoImprovement => None,
            }
        }
    };

    let best_child = match (sol_taken, sol_dropped) {
        (Some(a), Some(b)) => Some(if b.len() < a.len() { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    };
    match best_child {
        Some(sol) if sol.len() + r < ctx.q => {
            ctx.q = sol.len() + r;
            ctx.best = Some(reduce::reconstruct(trace, &sol));
            Ok(NodeOutcome::Solution(sol))
        }
        _ => Ok(NodeOutcome::NoImprovement),
    }
}

/// Covering relaxation plus optional cascade tightening for a branch child.
fn child_bound(child: &BipartiteInstance, r: usize, ctx: &mut Ctx) -> Result<usize, Abort> {
    let report = bound::base_bound(child)?;
    ctx.stats.lp_calls += 1;
    let mut lb = report.lb;
    if ctx.cfg.multilp.enabled
        && bound::should_tighten(report.sol, lb, r, ctx.q, child, &ctx.cfg.multilp)
    {
        let mut rng = ctx.node_rng(BOUND_SALT, child);
        let run = bound::multi_lp(child, lb, &mut rng)?;
        ctx.stats.multilp_calls += 1;
        ctx.stats.lp_calls += run.lp_calls;
        if run.lb > lb {
            ctx.stats.multilp_tightened += 1;
        }
        lb = run.lb;
    }
    Ok(lb)
}

fn run_search(
    h: &BipartiteInstance,
    initial_q: usize,
    cfg: &Config,
    started: Instant,
    trivial: Option<BTreeSet<NodeId>>,
) -> Result<SolveResult, SolveError> {
    let deadline = cfg
        .time_limit_seconds
        .map(|secs| started + std::time::Duration::from_secs_f64(secs));
    let mut ctx = Ctx {
        q: initial_q,
        best: None,
        cfg,
        stats: SearchStats::default(),
        deadline,
    };
    let mut trace = Vec::new();
    let outcome = search(h, 0, 0, &mut ctx, &mut trace);
    let mut stats = ctx.stats;
    stats.wall_time_seconds = started.elapsed().as_secs_f64();
    match outcome {
        Err(Abort::Timeout) => Ok(SolveResult {
            status: SolveStatus::Timeout,
            solution: ctx.best,
            stats,
        }),
        Err(Abort::Failed(e)) => Err(e),
        Ok(NodeOutcome::Solution(sol)) => Ok(SolveResult {
            status: SolveStatus::Optimal,
            solution: Some(sol),
            stats,
        }),
        Ok(NodeOutcome::NoImprovement) => {
            let solution = match ctx.best {
                Some(best) => best,
                None => trivial.ok_or_else(|| {
                    SolveError::Internal(
                        "search ended without a solution on a feasible instance".into(),
                    )
                })?,
            };
            Ok(SolveResult { status: SolveStatus::Optimal, solution: Some(solution), stats })
        }
    }
}

/// Exact minimum dominating set. Builds the two-part covering instance over
/// closed neighborhoods and searches with the trivial all-vertices incumbent.
pub fn solve_mds(g: &Graph, cfg: &Config) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    let h = BipartiteInstance::from_graph(g);
    // When nothing beats the trivial incumbent, the full vertex set is
    // itself optimal.
    let trivial: BTreeSet<NodeId> = g.vertices().collect();
    run_search(&h, g.vertex_count(), cfg, started, Some(trivial))
}

/// Exact minimum UD-cover of a two-part instance. The initial incumbent is
/// one above `|UB|` so even the all-of-UB solution is an improvement.
pub fn solve_pds(h: &BipartiteInstance, cfg: &Config) -> Result<SolveResult, SolveError> {
    let started = Instant::now();
    if h.has_undominatable_node() {
        let mut stats = SearchStats::default();
        stats.wall_time_seconds = started.elapsed().as_secs_f64();
        return Ok(SolveResult { status: SolveStatus::Infeasible, solution: None, stats });
    }
    run_search(h, h.ub().len() + 1, cfg, started, None)
}

/// Maps a PDS solution from node ids to the origin labels recorded when the
/// instance was built or parsed.
pub fn origin_labels(h: &BipartiteInstance, solution: &BTreeSet<NodeId>) -> BTreeSet<usize> {
    solution
        .iter()
        .map(|&v| match h.origin(v) {
            Origin::Original(label) => *label,
            Origin::Merged(..) => {
                unreachable!("reconstructed solutions contain only original nodes")
            }
        })
        .collect()
}

/// True iff every vertex of `g` is in `candidate` or adjacent to it.
pub fn verify_mds(g: &Graph, candidate: &BTreeSet<usize>) -> bool {
    g.vertices().all(|v| {
        candidate.contains(&v) || g.neighbors(v).iter().any(|w| candidate.contains(w))
    })
}

/// True iff `candidate ⊆ UB` and every UD node has a dominator in it.
pub fn verify_pds(h: &BipartiteInstance, candidate: &BTreeSet<NodeId>) -> bool {
    candidate.iter().all(|&v| h.ub().contains(&v))
        && h.ud()
            .iter()
            .all(|&u| h.neighbors(u).iter().any(|w| candidate.contains(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph;
    use crate::oracle;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn triangle_cover_instance_solves_without_branching() {
        let res = solve_pds(&gen::six_cycle_instance(), &cfg()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.size(), Some(2));
        assert!(res.stats.s_num <= 4);
        assert!(verify_pds(
            &gen::six_cycle_instance(),
            res.solution.as_ref().unwrap()
        ));
    }

    #[test]
    fn double_triangle_cover_needs_four() {
        let res = solve_pds(&gen::double_six_cycle_instance(), &cfg()).unwrap();
        assert_eq!(res.size(), Some(4));
    }

    #[test]
    fn empty_ud_is_trivially_covered() {
        let h = BipartiteInstance::from_parts(&[1, 2], &[], &[]);
        let res = solve_pds(&h, &cfg()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.size(), Some(0));
    }

    #[test]
    fn undominatable_node_is_infeasible() {
        let h = BipartiteInstance::from_parts(&[1], &[1, 2], &[(0, 0)]);
        let res = solve_pds(&h, &cfg()).unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
        assert_eq!(res.solution, None);
    }

    #[test]
    fn single_cover_pair() {
        let h = BipartiteInstance::from_parts(&[1], &[1], &[(0, 0)]);
        let res = solve_pds(&h, &cfg()).unwrap();
        assert_eq!(res.solution, Some(BTreeSet::from([0])));
    }

    #[test]
    fn star_center_dominates() {
        let res = solve_mds(&graph::star(5), &cfg()).unwrap();
        assert_eq!(res.solution, Some(BTreeSet::from([0])));
    }

    #[test]
    fn path_ten_needs_four() {
        let res = solve_mds(&graph::path(10), &cfg()).unwrap();
        assert_eq!(res.size(), Some(4));
        assert!(verify_mds(&graph::path(10), res.solution.as_ref().unwrap()));
    }

    #[test]
    fn petersen_needs_three() {
        let res = solve_mds(&graph::petersen(), &cfg()).unwrap();
        assert_eq!(res.size(), Some(3));
    }

    #[test]
    fn edgeless_graph_needs_everything() {
        let g = graph::Graph::new(4);
        let res = solve_mds(&g, &cfg()).unwrap();
        assert_eq!(res.size(), Some(4));
        let empty = graph::Graph::new(0);
        let res = solve_mds(&empty, &cfg()).unwrap();
        assert_eq!(res.size(), Some(0));
    }

    #[test]
    fn matches_oracle_on_small_graphs() {
        for seed in 0..40 {
            let n = 4 + (seed as usize % 9);
            let m = (n - 1) + (seed as usize % n);
            let g = gen::gnm(n, m.min(n * (n - 1) / 2), seed).unwrap();
            let res = solve_mds(&g, &cfg()).unwrap();
            let expected = oracle::brute_force_mds(&g).unwrap().len();
            assert_eq!(res.size(), Some(expected), "seed {seed}");
            assert!(verify_mds(&g, res.solution.as_ref().unwrap()), "seed {seed}");
        }
    }

    #[test]
    fn matches_oracle_on_random_two_part_instances() {
        let mut checked = 0;
        for seed in 0..60 {
            let h = gen::random_bipartite(7, 7, 0.35, seed);
            if h.has_undominatable_node() || h.ud().is_empty() {
                continue;
            }
            let res = solve_pds(&h, &cfg()).unwrap();
            let expected = oracle::brute_force_pds(&h).unwrap().size().unwrap();
            assert_eq!(res.size(), Some(expected), "seed {seed}");
            assert!(verify_pds(&h, res.solution.as_ref().unwrap()), "seed {seed}");
            checked += 1;
        }
        assert!(checked >= 40, "only {checked} instances checked");
    }

    #[test]
    fn identical_runs_are_identical() {
        let g = gen::gnm(14, 26, 5).unwrap();
        let a = solve_mds(&g, &cfg()).unwrap();
        let b = solve_mds(&g, &cfg()).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.stats.s_num, b.stats.s_num);
        assert_eq!(a.stats.lp_calls, b.stats.lp_calls);
        assert_eq!(a.stats.rule_fires, b.stats.rule_fires);
    }

    #[test]
    fn cascade_toggle_preserves_the_optimum() {
        for seed in [2, 9] {
            let g = gen::gnm(13, 30, seed).unwrap();
            let with = solve_mds(&g, &cfg()).unwrap();
            let mut no_cascade = cfg();
            no_cascade.multilp.enabled = false;
            let without = solve_mds(&g, &no_cascade).unwrap();
            assert_eq!(with.size(), without.size(), "seed {seed}");
        }
    }

    #[test]
    fn zero_time_limit_reports_timeout() {
        let mut config = cfg();
        config.time_limit_seconds = Some(0.0);
        let g = gen::gnm(20, 50, 1).unwrap();
        let res = solve_mds(&g, &config).unwrap();
        assert_eq!(res.status, SolveStatus::Timeout);
    }

    #[test]
    fn verification_examples() {
        let p3 = graph::path(3);
        assert!(verify_mds(&p3, &BTreeSet::from([1])));
        assert!(!verify_mds(&p3, &BTreeSet::from([0])));
        let h = gen::six_cycle_instance();
        assert!(verify_pds(&h, &BTreeSet::from([0, 1])));
        assert!(!verify_pds(&h, &BTreeSet::from([0])));
        // Candidates must come from UB.
        assert!(!verify_pds(&h, &BTreeSet::from([3, 4, 5])));
    }

    #[test]
    fn origin_label_mapping() {
        let h = BipartiteInstance::from_parts(&[10, 20, 30], &[1, 2], &[(0, 0), (1, 1), (2, 0)]);
        let labels = origin_labels(&h, &BTreeSet::from([0, 2]));
        assert_eq!(labels, BTreeSet::from([10, 30]));
    }
}
