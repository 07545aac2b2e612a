//! Brute-force reference answers for small instances.
//!
//! Everything here enumerates candidate sets by increasing cardinality with
//! its own domination checks, sharing no reduction, bound, or LP code with
//! the solver — that independence is what makes these usable as oracles.

use itertools::Itertools;
use thiserror::Error;

use crate::gen::KPartInstance;
use crate::graph::{Graph, VertexId};
use crate::instance::{BipartiteInstance, NodeId};
use std::collections::BTreeSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the brute-force oracle: {0}")]
    TooLarge(String),
}

/// Minimum dominating set by increasing-size enumeration. Guarded to
/// `n <= 25` vertices.
pub fn brute_force_mds(g: &Graph) -> Result<BTreeSet<VertexId>, OracleError> {
    let n = g.vertex_count();
    if n > 25 {
        return Err(OracleError::TooLarge(format!("{n} vertices")));
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let closed: Vec<u32> = (0..n)
        .map(|v| {
            g.closed_neighborhood(v)
                .iter()
                .fold(0u32, |acc, &w| acc | 1 << w)
        })
        .collect();
    for k in 0..=n {
        for combo in (0..n).combinations(k) {
            let covered = combo.iter().fold(0u32, |acc, &v| acc | closed[v]);
            if covered == full {
                return Ok(combo.into_iter().collect());
            }
        }
    }
    unreachable!("the full vertex set always dominates");
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PdsOutcome {
    Solution(BTreeSet<NodeId>),
    Infeasible,
}

impl PdsOutcome {
    pub fn size(&self) -> Option<usize> {
        match self {
            PdsOutcome::Solution(s) => Some(s.len()),
            PdsOutcome::Infeasible => None,
        }
    }
}

/// Minimum UD-cover of a two-part instance by increasing-size enumeration,
/// or `Infeasible` when some UD node has no dominator. Guarded to
/// `|UB| <= 22`.
pub fn brute_force_pds(h: &BipartiteInstance) -> Result<PdsOutcome, OracleError> {
    let ub: Vec<NodeId> = h.ub().iter().copied().collect();
    let ud: Vec<NodeId> = h.ud().iter().copied().collect();
    if ub.len() > 22 {
        return Err(OracleError::TooLarge(format!("{} UB nodes", ub.len())));
    }
    if ud.len() > 64 {
        return Err(OracleError::TooLarge(format!("{} UD nodes", ud.len())));
    }
    if ud.iter().any(|&u| h.degree(u) == 0) {
        return Ok(PdsOutcome::Infeasible);
    }
    let full: u64 = if ud.len() == 64 { u64::MAX } else { (1u64 << ud.len()) - 1 };
    let covers: Vec<u64> = ub
        .iter()
        .map(|&b| {
            h.neighbors(b).iter().fold(0u64, |acc, w| {
                acc | 1 << ud.binary_search(w).expect("neighbor is a UD node")
            })
        })
        .collect();
    for k in 0..=ub.len() {
        for combo in (0..ub.len()).combinations(k) {
            let covered = combo.iter().fold(0u64, |acc, &i| acc | covers[i]);
            if covered == full {
                return Ok(PdsOutcome::Solution(combo.into_iter().map(|i| ub[i]).collect()));
            }
        }
    }
    unreachable!("all of UB dominates once every UD degree is positive");
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KpdsOutcome {
    Size(usize),
    Infeasible,
}

/// Minimum partitioned cover: the smallest `P` avoiding the target part,
/// meeting every other part, and dominating every target vertex.
pub fn brute_force_kpds(inst: &KPartInstance) -> Result<KpdsOutcome, OracleError> {
    let g = &inst.graph;
    let target = &inst.parts[inst.target];
    let candidates: Vec<VertexId> = inst
        .parts
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != inst.target)
        .flat_map(|(_, p)| p.iter().copied())
        .sorted()
        .collect();
    if candidates.len() > 24 {
        return Err(OracleError::TooLarge(format!("{} candidate vertices", candidates.len())));
    }
    if target.len() > 64 {
        return Err(OracleError::TooLarge(format!("{} target vertices", target.len())));
    }
    // Existence demands a neighbor outside the target part for every target
    // vertex, and a nonempty contribution from every other part.
    let in_target: BTreeSet<VertexId> = target.iter().copied().collect();
    for &x in target {
        if g.neighbors(x).iter().all(|v| in_target.contains(v)) {
            return Ok(KpdsOutcome::Infeasible);
        }
    }
    if inst.parts.iter().enumerate().any(|(i, p)| i != inst.target && p.is_empty()) {
        return Ok(KpdsOutcome::Infeasible);
    }
    let part_of: std::collections::BTreeMap<VertexId, usize> = inst
        .parts
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.iter().map(move |&v| (v, i)))
        .collect();
    let target_pos: std::collections::BTreeMap<VertexId, usize> =
        target.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let full: u64 = if target.len() == 64 { u64::MAX } else { (1u64 << target.len()) - 1 };
    let covers: Vec<u64> = candidates
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|w| target_pos.get(w))
                .fold(0u64, |acc, &i| acc | 1 << i)
        })
        .collect();
    let num_parts = inst.parts.len();
    let min_size = num_parts - 1;
    for k in min_size..=candidates.len() {
        for combo in (0..candidates.len()).combinations(k) {
            let covered = combo.iter().fold(0u64, |acc, &i| acc | covers[i]);
            if covered != full {
                continue;
            }
            let mut hit = vec![false; num_parts];
            for &i in &combo {
                hit[part_of[&candidates[i]]] = true;
            }
            let all_hit = (0..num_parts).all(|p| p == inst.target || hit[p]);
            if all_hit {
                return Ok(KpdsOutcome::Size(k));
            }
        }
    }
    Ok(KpdsOutcome::Infeasible)
}

/// Full truth-table satisfiability check, guarded to 20 variables.
pub fn satisfiable(f: &crate::gen::CnfFormula) -> Result<bool, OracleError> {
    if f.num_vars > 20 {
        return Err(OracleError::TooLarge(format!("{} variables", f.num_vars)));
    }
    for assignment in 0u32..(1u32 << f.num_vars) {
        let ok = f.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let var = lit.unsigned_abs() as usize - 1;
                let value = assignment & (1 << var) != 0;
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
        });
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exhaustive alternating-path search: does any simple augmenting path exist
/// for `mate`? Independent of the blossom machinery; exponential, so small
/// graphs only.
pub fn exists_augmenting_path(adj: &[Vec<usize>], mate: &[Option<usize>]) -> bool {
    let n = adj.len();
    assert!(n <= 64, "augmenting-path certificate supports at most 64 vertices");

    // expect_matched: the next edge on the path must be a matching edge.
    fn dfs(
        adj: &[Vec<usize>],
        mate: &[Option<usize>],
        v: usize,
        mask: u64,
        expect_matched: bool,
    ) -> bool {
        if expect_matched {
            let w = mate[v].expect("alternating path continues over a matched vertex");
            mask & (1 << w) == 0 && dfs(adj, mate, w, mask | 1 << w, false)
        } else {
            for &w in &adj[v] {
                if mask & (1 << w) != 0 || mate[v] == Some(w) {
                    continue;
                }
                if mate[w].is_none() {
                    return true;
                }
                if dfs(adj, mate, w, mask | 1 << w, true) {
                    return true;
                }
            }
            false
        }
    }

    (0..n).any(|r| mate[r].is_none() && dfs(adj, mate, r, 1 << r, false))
}

/// Maximum matching cardinality by exhaustive search over an adjacency-list
/// graph. Exponential; for cross-checking the matching algorithm on small
/// graphs only.
pub fn brute_force_max_matching(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut edges = Vec::new();
    for (u, ns) in adj.iter().enumerate() {
        for &v in ns {
            if u < v {
                edges.push((u, v));
            }
        }
    }
    fn go(edges: &[(usize, usize)], idx: usize, used: u64, n: usize) -> usize {
        if idx == edges.len() {
            return 0;
        }
        let (u, v) = edges[idx];
        let skip = go(edges, idx + 1, used, n);
        if used & (1 << u) == 0 && used & (1 << v) == 0 {
            let take = 1 + go(edges, idx + 1, used | 1 << u | 1 << v, n);
            skip.max(take)
        } else {
            skip
        }
    }
    assert!(n <= 64, "brute-force matching supports at most 64 vertices");
    go(&edges, 0, 0, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph;

    #[test]
    fn mds_of_small_graphs() {
        assert_eq!(brute_force_mds(&graph::complete(3)).unwrap().len(), 1);
        assert_eq!(brute_force_mds(&graph::path(10)).unwrap().len(), 4);
        assert_eq!(brute_force_mds(&graph::Graph::new(5)).unwrap().len(), 5);
    }

    #[test]
    fn mds_of_paths_matches_formula() {
        // Domination number of a path on n vertices is ceil(n/3).
        for n in 1..=12 {
            let found = brute_force_mds(&graph::path(n)).unwrap().len();
            assert_eq!(found, n.div_ceil(3), "path on {n}");
        }
    }

    #[test]
    fn mds_guard() {
        assert!(brute_force_mds(&graph::Graph::new(26)).is_err());
    }

    #[test]
    fn pds_of_triangle_cover() {
        let h = gen::six_cycle_instance();
        match brute_force_pds(&h).unwrap() {
            PdsOutcome::Solution(s) => assert_eq!(s.len(), 2),
            PdsOutcome::Infeasible => panic!("feasible instance"),
        }
    }

    #[test]
    fn pds_of_double_triangle_cover() {
        let h = gen::double_six_cycle_instance();
        assert_eq!(brute_force_pds(&h).unwrap().size(), Some(4));
    }

    #[test]
    fn pds_degenerate_cases() {
        let h = BipartiteInstance::from_parts(&[1], &[1], &[]);
        assert_eq!(brute_force_pds(&h).unwrap(), PdsOutcome::Infeasible);
        let empty_ud = BipartiteInstance::from_parts(&[1, 2], &[], &[]);
        assert_eq!(brute_force_pds(&empty_ud).unwrap(), PdsOutcome::Solution(BTreeSet::new()));
    }

    #[test]
    fn satisfiability_basics() {
        let f = gen::CnfFormula { num_vars: 3, clauses: vec![[1, 2, 3]] };
        assert!(satisfiable(&f).unwrap());
        assert!(!satisfiable(&gen::unsatisfiable_core()).unwrap());
    }

    #[test]
    fn single_clause_construction_needs_all_variable_parts() {
        let f = gen::CnfFormula { num_vars: 3, clauses: vec![[1, 2, 3]] };
        let inst = gen::sat_to_pds(&f);
        assert_eq!(brute_force_kpds(&inst).unwrap(), KpdsOutcome::Size(3));
    }

    #[test]
    fn kpds_infeasible_when_target_vertex_is_isolated() {
        // Two parts; the target vertex's only neighbor is inside the target.
        let mut g = graph::Graph::new(3);
        g.add_edge(1, 2);
        let inst = gen::KPartInstance {
            graph: g,
            parts: vec![vec![0], vec![1, 2]],
            target: 1,
        };
        assert_eq!(brute_force_kpds(&inst).unwrap(), KpdsOutcome::Infeasible);
    }

    #[test]
    fn kpds_agrees_with_pds_on_two_part_instances() {
        // A 2-part instance with nonempty UD is the same problem, except
        // that the partitioned form also insists on P being nonempty; that
        // only matters when UD is empty, which we exclude here.
        let mut checked = 0;
        for seed in 0..80 {
            let h = gen::random_bipartite(5, 5, 0.4, seed);
            if h.ud().is_empty() || h.has_undominatable_node() {
                continue;
            }
            let pds = brute_force_pds(&h).unwrap().size().unwrap();
            if pds == 0 {
                continue;
            }
            let mut g = graph::Graph::new(10);
            for (bi, &b) in h.ub().iter().enumerate() {
                for w in h.neighbors(b) {
                    let di = h.ud().iter().position(|x| x == w).unwrap();
                    g.add_edge(bi, 5 + di);
                }
            }
            let inst = gen::KPartInstance {
                graph: g,
                parts: vec![(0..5).collect(), (5..10).collect()],
                target: 1,
            };
            assert_eq!(brute_force_kpds(&inst).unwrap(), KpdsOutcome::Size(pds), "seed {seed}");
            checked += 1;
        }
        assert!(checked >= 50, "only {checked} instances were comparable");
    }

    #[test]
    fn brute_matching_counts() {
        let tri = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        assert_eq!(brute_force_max_matching(&tri), 1);
        let c4 = vec![vec![1, 3], vec![0, 2], vec![1, 3], vec![0, 2]];
        assert_eq!(brute_force_max_matching(&c4), 2);
    }
}
