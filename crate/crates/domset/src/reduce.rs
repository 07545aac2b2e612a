//! The nine instance reductions, their detection in priority order, the
//! reconstruction trace, and the matching-based base case for instances
//! whose UB degrees are all at most two.
//!
//! Every detector assumes all lower-numbered rules are inapplicable; the
//! correctness of several rules depends on that priority. Rules 1, 5, 6 and
//! 8 commit one vertex to the solution (`delta_r = 1`); rules 2, 3, 4 and 9
//! only shrink the instance.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::config::RulesConfig;
use crate::instance::{BipartiteInstance, InstanceError, NodeId, Part};
use crate::matching;

#[derive(Debug, Error, PartialEq)]
pub enum ReduceError {
    #[error("reduction contract violation: {0}")]
    Contract(String),
    #[error("reduction internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleMatch {
    pub rule: u8,
    pub payload: RulePayload,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RulePayload {
    /// Rule 1: `u ∈ UD` has the single dominator `v`; `v` is forced.
    DominatedLeaf { u: NodeId, v: NodeId },
    /// Rule 2: `u ∈ UB` covers a single UD node that has other dominators.
    UselessUb { u: NodeId },
    /// Rule 3: `N(u1) ⊆ N(u2)` in UB; `u1` is never needed.
    UbSubsumed { u1: NodeId, u2: NodeId },
    /// Rule 4: `N(u1) ⊆ N(u2)` in UD; covering `u1` covers `u2` for free.
    UdSubsumed { u1: NodeId, u2: NodeId },
    /// Rule 5: the UD two-path gadget around `u`; `v1, v2` get identified.
    UdGadget { u: NodeId, u1: NodeId, u2: NodeId, v1: NodeId, v2: NodeId },
    /// Rule 6: the UB two-path gadget around `u`; `v1, v2` get identified.
    UbGadget { u: NodeId, u1: NodeId, u2: NodeId, v1: NodeId, v2: NodeId },
    /// Rule 7: every UB degree is at most two; solve by maximum matching.
    PathCover,
    /// Rule 8: some second-hop neighbor `witness` of `u` is redundant, so
    /// `u` joins the solution.
    ForcedHub { u: NodeId, witness: NodeId },
    /// Rule 9: `v`'s coverage lies inside `N(v1) ∪ N(v2)` for a 2-degree UD
    /// node with dominators `v1, v2`; `v` is never needed.
    CoveredAlternative { u: NodeId, v1: NodeId, v2: NodeId, v: NodeId },
}

/// One applied reduction (or branch decision), with enough saved context to
/// rebuild a solution of the pre-rule instance from a child solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEntry {
    /// Rules 1 and 8: `v` was committed; its covered UD set was removed.
    Include { v: NodeId, removed_ud: BTreeSet<NodeId> },
    /// Rules 2, 3, 9.
    DeleteUb { v: NodeId },
    /// Rule 4.
    DeleteUd { v: NodeId },
    /// Rule 5. `saved_adj_v1` is `N(v1)` before the rule fired; on unwind it
    /// decides whether `u1` or `u2` completes the child solution.
    IdentifyUd {
        u: NodeId,
        u1: NodeId,
        u2: NodeId,
        v1: NodeId,
        v2: NodeId,
        v: NodeId,
        saved_adj_v1: BTreeSet<NodeId>,
    },
    /// Rule 6. On unwind, a child solution using `v` swaps it for both
    /// originals; otherwise `u` joins.
    IdentifyUb { u: NodeId, u1: NodeId, u2: NodeId, v1: NodeId, v2: NodeId, v: NodeId },
    /// Branch decision on `s`.
    Branch { s: NodeId, included: bool },
}

impl TraceEntry {
    /// How many solution vertices this entry adds on unwind.
    pub fn delta(&self) -> usize {
        match self {
            TraceEntry::Include { .. }
            | TraceEntry::IdentifyUd { .. }
            | TraceEntry::IdentifyUb { .. } => 1,
            TraceEntry::Branch { included, .. } => usize::from(*included),
            TraceEntry::DeleteUb { .. } | TraceEntry::DeleteUd { .. } => 0,
        }
    }
}

/// Lowest-index applicable rule with a concrete witness, or `None`.
///
/// Callers guarantee that no UD node has degree zero.
pub fn find_rule(h: &BipartiteInstance, rules: &RulesConfig) -> Option<RuleMatch> {
    (1..=9)
        .filter(|&k| rules.rule_enabled(k))
        .find_map(|k| detect(h, k))
}

/// Runs a single rule's detector, ignoring priority. Useful for ablations
/// and for asserting that lower rules are indeed inapplicable.
pub fn detect(h: &BipartiteInstance, rule: u8) -> Option<RuleMatch> {
    match rule {
        1 => detect_dominated_leaf(h),
        2 => detect_useless_ub(h),
        3 => detect_subsumed(h, Part::Ub),
        4 => detect_subsumed(h, Part::Ud),
        5 => detect_gadget(h, Part::Ud),
        6 => detect_gadget(h, Part::Ub),
        7 => (h.max_degree(Part::Ub) <= 2)
            .then_some(RuleMatch { rule: 7, payload: RulePayload::PathCover }),
        8 => detect_forced_hub(h),
        9 => detect_covered_alternative(h),
        _ => panic!("rule index {rule} out of range"),
    }
}

fn detect_dominated_leaf(h: &BipartiteInstance) -> Option<RuleMatch> {
    let u = h.degree_class(Part::Ud, 1).into_iter().next()?;
    let v = *h.neighbors(u).iter().next().expect("degree-1 node has a neighbor");
    Some(RuleMatch { rule: 1, payload: RulePayload::DominatedLeaf { u, v } })
}

fn detect_useless_ub(h: &BipartiteInstance) -> Option<RuleMatch> {
    let u = h.degree_class(Part::Ub, 1).into_iter().next()?;
    Some(RuleMatch { rule: 2, payload: RulePayload::UselessUb { u } })
}

/// Containment scan shared by rules 3 and 4: find `u1, u2` in `part` with
/// `N(u1) ⊆ N(u2)`, counting shared neighbors through the two-hop
/// neighborhood.
fn detect_subsumed(h: &BipartiteInstance, part: Part) -> Option<RuleMatch> {
    let nodes = match part {
        Part::Ub => h.ub(),
        Part::Ud => h.ud(),
    };
    for &u1 in nodes {
        let deg = h.degree(u1);
        if deg == 0 {
            // Empty neighborhood is contained in any other node's.
            if let Some(&u2) = nodes.iter().find(|&&w| w != u1) {
                return Some(subsumed_match(part, u1, u2));
            }
            continue;
        }
        let mut shared: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &x in h.neighbors(u1) {
            for &w in h.neighbors(x) {
                if w != u1 {
                    *shared.entry(w).or_insert(0) += 1;
                }
            }
        }
        if let Some((&u2, _)) = shared.iter().find(|&(_, &c)| c == deg) {
            return Some(subsumed_match(part, u1, u2));
        }
    }
    None
}

fn subsumed_match(part: Part, u1: NodeId, u2: NodeId) -> RuleMatch {
    match part {
        Part::Ub => RuleMatch { rule: 3, payload: RulePayload::UbSubsumed { u1, u2 } },
        Part::Ud => RuleMatch { rule: 4, payload: RulePayload::UdSubsumed { u1, u2 } },
    }
}

/// The two-path gadget of rules 5 (around a UD node) and 6 (around a UB
/// node): `u` of degree two whose two neighbors also have degree two.
fn detect_gadget(h: &BipartiteInstance, part: Part) -> Option<RuleMatch> {
    for u in h.degree_class(part, 2) {
        let mut ns = h.neighbors(u).iter().copied();
        let (u1, u2) = (ns.next().unwrap(), ns.next().unwrap());
        if h.degree(u1) != 2 || h.degree(u2) != 2 {
            continue;
        }
        let other = |x: NodeId| *h.neighbors(x).iter().find(|&&w| w != u).unwrap();
        let (v1, v2) = (other(u1), other(u2));
        if v1 == v2 {
            // N(u1) = N(u2); the containment rules own this shape.
            continue;
        }
        match part {
            Part::Ud => {
                // Side condition: the merged node must keep a dominator.
                let has_outside = h
                    .neighbors(v1)
                    .iter()
                    .chain(h.neighbors(v2))
                    .any(|&w| w != u1 && w != u2);
                if has_outside {
                    return Some(RuleMatch {
                        rule: 5,
                        payload: RulePayload::UdGadget { u, u1, u2, v1, v2 },
                    });
                }
            }
            Part::Ub => {
                return Some(RuleMatch {
                    rule: 6,
                    payload: RulePayload::UbGadget { u, u1, u2, v1, v2 },
                });
            }
        }
    }
    None
}

fn detect_forced_hub(h: &BipartiteInstance) -> Option<RuleMatch> {
    for &u in h.ub() {
        // The degree-2 UD neighbors of u and their second dominators.
        let hops: Vec<(NodeId, NodeId)> = h
            .neighbors(u)
            .iter()
            .filter(|&&v| h.degree(v) == 2)
            .map(|&v| {
                let ui = *h.neighbors(v).iter().find(|&&w| w != u).unwrap();
                (v, ui)
            })
            .collect();
        if hops.is_empty() {
            continue;
        }
        let mut count: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &(_, ui) in &hops {
            for &w in h.neighbors(ui) {
                *count.entry(w).or_insert(0) += 1;
            }
        }
        for &(vi, ui) in &hops {
            let redundant = h
                .neighbors(ui)
                .iter()
                .all(|&w| w == vi || count.get(&w).copied().unwrap_or(0) >= 2);
            if redundant {
                return Some(RuleMatch { rule: 8, payload: RulePayload::ForcedHub { u, witness: ui } });
            }
        }
    }
    None
}

fn detect_covered_alternative(h: &BipartiteInstance) -> Option<RuleMatch> {
    for u in h.degree_class(Part::Ud, 2) {
        let mut ns = h.neighbors(u).iter().copied();
        let (v1, v2) = (ns.next().unwrap(), ns.next().unwrap());
        let union: BTreeSet<NodeId> =
            h.neighbors(v1).union(h.neighbors(v2)).copied().collect();
        for &v in h.ub() {
            if v == v1 || v == v2 {
                continue;
            }
            if h.neighbors(v).is_subset(&union) {
                return Some(RuleMatch {
                    rule: 9,
                    payload: RulePayload::CoveredAlternative { u, v1, v2, v },
                });
            }
        }
    }
    None
}

/// Applies a detected rule. Returns the reduced instance, the trace entry
/// for reconstruction, and the rule's solution-size contribution.
pub fn apply_rule(
    h: &BipartiteInstance,
    m: &RuleMatch,
) -> Result<(BipartiteInstance, TraceEntry, usize), ReduceError> {
    match &m.payload {
        RulePayload::DominatedLeaf { v, .. } => {
            let removed_ud = h.neighbors(*v).clone();
            let reduced = h.delete_closed(*v)?;
            Ok((reduced, TraceEntry::Include { v: *v, removed_ud }, 1))
        }
        RulePayload::UselessUb { u } => {
            Ok((h.delete_node(*u)?, TraceEntry::DeleteUb { v: *u }, 0))
        }
        RulePayload::UbSubsumed { u1, .. } => {
            Ok((h.delete_node(*u1)?, TraceEntry::DeleteUb { v: *u1 }, 0))
        }
        RulePayload::UdSubsumed { u2, .. } => {
            Ok((h.delete_node(*u2)?, TraceEntry::DeleteUd { v: *u2 }, 0))
        }
        RulePayload::UdGadget { u, u1, u2, v1, v2 } => {
            if v1 == v2 {
                return Err(ReduceError::Internal(
                    "gadget endpoints coincide; containment rules should have fired".into(),
                ));
            }
            let saved_adj_v1 = h.neighbors(*v1).clone();
            let shrunk = h.delete_closed(*u)?;
            let (reduced, v) = shrunk.identify(Part::Ud, *v1, *v2)?;
            let entry = TraceEntry::IdentifyUd {
                u: *u,
                u1: *u1,
                u2: *u2,
                v1: *v1,
                v2: *v2,
                v,
                saved_adj_v1,
            };
            Ok((reduced, entry, 1))
        }
        RulePayload::UbGadget { u, u1, u2, v1, v2 } => {
            if v1 == v2 {
                return Err(ReduceError::Internal(
                    "gadget endpoints coincide; containment rules should have fired".into(),
                ));
            }
            let shrunk = h.delete_closed(*u)?;
            let (reduced, v) = shrunk.identify(Part::Ub, *v1, *v2)?;
            let entry =
                TraceEntry::IdentifyUb { u: *u, u1: *u1, u2: *u2, v1: *v1, v2: *v2, v };
            Ok((reduced, entry, 1))
        }
        RulePayload::PathCover => Err(ReduceError::Contract(
            "the matching base case is solved directly, not applied as a reduction".into(),
        )),
        RulePayload::ForcedHub { u, .. } => {
            let removed_ud = h.neighbors(*u).clone();
            let reduced = h.delete_closed(*u)?;
            Ok((reduced, TraceEntry::Include { v: *u, removed_ud }, 1))
        }
        RulePayload::CoveredAlternative { v, .. } => {
            Ok((h.delete_node(*v)?, TraceEntry::DeleteUb { v: *v }, 0))
        }
    }
}

/// Replays one trace entry against a child solution, lifting it to the
/// pre-rule instance.
pub fn unwind_entry(entry: &TraceEntry, sol: &mut BTreeSet<NodeId>) {
    match entry {
        TraceEntry::Include { v, .. } => {
            sol.insert(*v);
        }
        TraceEntry::DeleteUb { .. } | TraceEntry::DeleteUd { .. } => {}
        TraceEntry::IdentifyUd { u1, u2, saved_adj_v1, .. } => {
            // The child covers the merged node through one endpoint; commit
            // the dominator whose leaf the child did NOT already cover.
            if sol.iter().any(|x| saved_adj_v1.contains(x)) {
                sol.insert(*u2);
            } else {
                sol.insert(*u1);
            }
        }
        TraceEntry::IdentifyUb { u, v1, v2, v, .. } => {
            if sol.remove(v) {
                sol.insert(*v1);
                sol.insert(*v2);
            } else {
                sol.insert(*u);
            }
        }
        TraceEntry::Branch { s, included } => {
            if *included {
                sol.insert(*s);
            }
        }
    }
}

/// Unwinds a whole trace (in reverse application order) over a leaf
/// solution, producing a solution of the original instance.
pub fn reconstruct(trace: &[TraceEntry], leaf_solution: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let mut sol = leaf_solution.clone();
    for entry in trace.iter().rev() {
        unwind_entry(entry, &mut sol);
    }
    sol
}

/// The covering graph of the matching base case: one vertex per UD node, one
/// edge per degree-2 UB node joining its two covered UD nodes (parallel
/// candidates collapse, keeping the smallest UB label).
pub struct MatchingGraph {
    /// UD node of each matching-graph vertex.
    pub vertices: Vec<NodeId>,
    pub adj: Vec<Vec<usize>>,
    /// UB label of each kept edge, keyed by `(min, max)` vertex pair.
    pub labels: BTreeMap<(usize, usize), NodeId>,
}

pub fn build_matching_graph(h: &BipartiteInstance) -> MatchingGraph {
    let vertices: Vec<NodeId> = h.ud().iter().copied().collect();
    let index: BTreeMap<NodeId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); vertices.len()];
    let mut labels = BTreeMap::new();
    for &u in h.ub() {
        if h.degree(u) != 2 {
            continue;
        }
        let mut ns = h.neighbors(u).iter();
        let a = index[ns.next().unwrap()];
        let b = index[ns.next().unwrap()];
        let key = (a.min(b), a.max(b));
        if !labels.contains_key(&key) {
            labels.insert(key, u);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    MatchingGraph { vertices, adj, labels }
}

/// Exact solution when every UB degree is at most two: a maximum matching
/// on the covering graph picks the UB nodes that cover two UD nodes each,
/// and every unmatched UD node takes its smallest dominator. The result has
/// `|UD| − ν(M)` vertices, which is optimal by the edge-cover argument.
pub fn rule7_solve(h: &BipartiteInstance) -> Result<BTreeSet<NodeId>, ReduceError> {
    if h.max_degree(Part::Ub) > 2 {
        return Err(ReduceError::Contract("a UB node has degree above two".into()));
    }
    if h.has_undominatable_node() {
        return Err(ReduceError::Contract("a UD node has no dominator".into()));
    }
    let mg = build_matching_graph(h);
    let mate = matching::maximum_matching(&mg.adj);
    let mut solution = BTreeSet::new();
    for (a, b) in matching::matching_edges(&mate) {
        solution.insert(mg.labels[&(a, b)]);
    }
    for (i, m) in mate.iter().enumerate() {
        if m.is_none() {
            let ud_node = mg.vertices[i];
            let dominator = *h
                .neighbors(ud_node)
                .iter()
                .next()
                .expect("positive degree checked above");
            solution.insert(dominator);
        }
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle::{self, PdsOutcome};

    /// UB a:{1,2}, b:{2} — UD node 1 has a single dominator.
    fn leaf_instance() -> BipartiteInstance {
        BipartiteInstance::from_parts(&[1, 2], &[1, 2], &[(0, 0), (0, 1), (1, 1)])
    }

    #[test]
    fn rule1_detects_single_dominator() {
        let h = leaf_instance();
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 1);
        assert_eq!(m.payload, RulePayload::DominatedLeaf { u: 2, v: 0 });
    }

    #[test]
    fn rule1_apply_clears_covered_ud() {
        let h = leaf_instance();
        let m = detect(&h, 1).unwrap();
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 1);
        assert!(reduced.ud().is_empty());
        assert_eq!(reduced.ub().len(), 1);
        assert_eq!(
            entry,
            TraceEntry::Include { v: 0, removed_ud: BTreeSet::from([2, 3]) }
        );
        assert_eq!(reconstruct(&[entry], &BTreeSet::new()), BTreeSet::from([0]));
    }

    #[test]
    fn rule3_detects_ub_containment() {
        // UB a:{1,2}, b:{1,2,3}, c:{2,3}; no degree-1 node anywhere.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3],
            &[1, 2, 3],
            &[(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)],
        );
        assert!(detect(&h, 1).is_none());
        assert!(detect(&h, 2).is_none());
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 3);
        assert_eq!(m.payload, RulePayload::UbSubsumed { u1: 0, u2: 1 });
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 0);
        assert_eq!(entry, TraceEntry::DeleteUb { v: 0 });
        assert!(!reduced.contains(0));
    }

    #[test]
    fn six_cycle_reduces_via_the_ud_gadget() {
        // Every node has degree two, so the UD gadget hypotheses hold (the
        // side condition is met through the third UB node) and rule 5
        // preempts the base case. The reduction chain still reaches the
        // optimum of 2.
        let h = gen::six_cycle_instance();
        for rule in 1..=4 {
            assert!(detect(&h, rule).is_none(), "rule {rule} unexpectedly fired");
        }
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 5);
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 1);
        let child = oracle::brute_force_pds(&reduced).unwrap().size().unwrap();
        let original = oracle::brute_force_pds(&h).unwrap().size().unwrap();
        assert_eq!(original, child + delta);
        let leaf = match oracle::brute_force_pds(&reduced).unwrap() {
            PdsOutcome::Solution(s) => s,
            PdsOutcome::Infeasible => panic!("reduced instance stays feasible"),
        };
        let lifted = reconstruct(&[entry], &leaf);
        assert_eq!(lifted.len(), original);
    }

    #[test]
    fn base_case_match_is_not_applied_as_a_reduction() {
        // With the gadget rules masked off, the six-cycle reports the
        // matching base case, which is solved directly rather than applied.
        let h = gen::six_cycle_instance();
        let mask = RulesConfig { enabled_mask: 0b1_1100_1111 };
        let m = find_rule(&h, &mask).unwrap();
        assert_eq!(m.rule, 7);
        assert!(apply_rule(&h, &m).is_err());
    }

    fn ud_gadget_instance() -> BipartiteInstance {
        // UB u1:{u,v1}, u2:{u,v2}, w:{v1,v2}; UD u:{u1,u2}, v1:{u1,w}, v2:{u2,w}.
        BipartiteInstance::from_parts(
            &[1, 2, 3],
            &[1, 2, 3],
            &[(0, 0), (0, 1), (1, 0), (1, 2), (2, 1), (2, 2)],
        )
    }

    #[test]
    fn rule5_gadget_counts_and_reconstruction() {
        let h = ud_gadget_instance();
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 5);
        assert_eq!(
            m.payload,
            RulePayload::UdGadget { u: 3, u1: 0, u2: 1, v1: 4, v2: 5 }
        );
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 1);
        assert_eq!(reduced.ub().len(), h.ub().len() - 2);
        assert_eq!(reduced.ud().len(), h.ud().len() - 2);
        reduced.check_consistency();

        // Child optimum is {w}; w covered the old v1, so u2 completes it.
        let child = oracle::brute_force_pds(&reduced).unwrap();
        let leaf = match child {
            PdsOutcome::Solution(s) => s,
            PdsOutcome::Infeasible => panic!("reduced gadget stays feasible"),
        };
        assert_eq!(leaf, BTreeSet::from([2]));
        let lifted = reconstruct(&[entry], &leaf);
        assert_eq!(lifted, BTreeSet::from([1, 2]));
        let original_opt = oracle::brute_force_pds(&h).unwrap().size().unwrap();
        assert_eq!(lifted.len(), original_opt);
    }

    fn ub_gadget_instance() -> BipartiteInstance {
        // UB u:{u1,u2}, v1:{u1,x1,x2}, v2:{u2,x2,x3}, w:{x1,x3};
        // UD u1:{u,v1}, u2:{u,v2}, x1:{v1,w}, x2:{v1,v2}, x3:{v2,w}.
        // The endpoints v1, v2 have degree three, which keeps the mirror
        // gadget from firing on u1/u2 first.
        BipartiteInstance::from_parts(
            &[1, 2, 3, 4],
            &[1, 2, 3, 4, 5],
            &[
                (0, 0),
                (0, 1), // u
                (1, 0),
                (1, 2),
                (1, 3), // v1
                (2, 1),
                (2, 3),
                (2, 4), // v2
                (3, 2),
                (3, 4), // w
            ],
        )
    }

    #[test]
    fn rule6_identifies_ub_endpoints() {
        let h = ub_gadget_instance();
        for rule in 1..=5 {
            assert!(detect(&h, rule).is_none(), "rule {rule} unexpectedly fired");
        }
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 6);
        assert_eq!(
            m.payload,
            RulePayload::UbGadget { u: 0, u1: 4, u2: 5, v1: 1, v2: 2 }
        );
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 1);
        reduced.check_consistency();
        let child = oracle::brute_force_pds(&reduced).unwrap();
        let leaf = match child {
            PdsOutcome::Solution(s) => s,
            PdsOutcome::Infeasible => panic!("reduced gadget stays feasible"),
        };
        // The merged node is the unique size-1 cover of the child, so the
        // unwind exercises the swap branch.
        let v = match &entry {
            TraceEntry::IdentifyUb { v, .. } => *v,
            _ => panic!("rule 6 records an identification"),
        };
        assert_eq!(leaf, BTreeSet::from([v]));
        let lifted = reconstruct(&[entry.clone()], &leaf);
        assert_eq!(lifted, BTreeSet::from([1, 2]));
        let original = oracle::brute_force_pds(&h).unwrap().size().unwrap();
        assert_eq!(lifted.len(), original);
        // A child solution avoiding the merged node gains u instead.
        let without_v = reconstruct(&[entry], &BTreeSet::from([3]));
        assert_eq!(without_v, BTreeSet::from([0, 3]));
    }

    #[test]
    fn rule8_vacuous_single_hop_is_owned_by_rule2() {
        // v1 has the dominators u and u1 with d(u1) = 1. Taken alone, the
        // hub detector accepts (u, u1) as a vacuous witness — the spare
        // coverage of u1 is empty — but rule 2 removes u1 first, so the
        // full-priority scan never reports that shape as rule 8.
        //
        // UB u:{v1,t1,t2}, u1:{v1}, x1:{t1,z}, x2:{t2,z};
        // UD v1:{u,u1}, t1:{u,x1}, t2:{u,x2}, z:{x1,x2}.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4],
            &[1, 2, 3, 4],
            &[
                (0, 0),
                (0, 1),
                (0, 2),
                (1, 0),
                (2, 1),
                (2, 3),
                (3, 2),
                (3, 3),
            ],
        );
        assert_eq!(h.degree(1), 1);
        assert_eq!(
            detect(&h, 8).unwrap().payload,
            RulePayload::ForcedHub { u: 0, witness: 1 }
        );
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 2, "rule 2 must preempt the vacuous hub witness");
    }

    #[test]
    fn rule8_fires_on_shared_second_hop() {
        // u covers v1, v2, t (all degree 2); the second dominators u1, u2, x
        // all meet at w, so u1's spare coverage {w} is doubly covered and u
        // is forced.
        //
        // UB: u:{v1,v2,t}, u1:{v1,w}, u2:{v2,w}, x:{w,t};
        // UD: v1:{u,u1}, v2:{u,u2}, w:{u1,u2,x}, t:{u,x}.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4],
            &[1, 2, 3, 4],
            &[
                (0, 0),
                (0, 1),
                (0, 3), // u covers v1 v2 t
                (1, 0),
                (1, 2), // u1 covers v1 w
                (2, 1),
                (2, 2), // u2 covers v2 w
                (3, 2),
                (3, 3), // x covers w t
            ],
        );
        for rule in 1..=7 {
            assert!(detect(&h, rule).is_none(), "rule {rule} unexpectedly fired");
        }
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 8);
        assert_eq!(m.payload, RulePayload::ForcedHub { u: 0, witness: 1 });
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 1);
        assert!(matches!(entry, TraceEntry::Include { v: 0, .. }));
        let child = oracle::brute_force_pds(&reduced).unwrap().size().unwrap();
        let original = oracle::brute_force_pds(&h).unwrap().size().unwrap();
        assert_eq!(original, child + 1);
    }

    #[test]
    fn rule9_deletes_covered_alternative() {
        // UD u (the only degree-2 UD node) has dominators v1, v2; UB v's
        // coverage sits inside N(v1) ∪ N(v2) without being contained in
        // either alone. Every other UD node has degree three, which keeps
        // the gadget and hub rules quiet.
        //
        // UB v1:{u,a,c}, v2:{u,b,d}, v:{a,b}, p:{a,c,d}, q:{b,c,d};
        // UD u:{v1,v2}, a:{v1,v,p}, b:{v2,v,q}, c:{v1,p,q}, d:{v2,p,q}.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4, 5],
            &[1, 2, 3, 4, 5],
            &[
                (0, 0),
                (0, 1),
                (0, 3), // v1
                (1, 0),
                (1, 2),
                (1, 4), // v2
                (2, 1),
                (2, 2), // v
                (3, 1),
                (3, 3),
                (3, 4), // p
                (4, 2),
                (4, 3),
                (4, 4), // q
            ],
        );
        for rule in 1..=8 {
            assert!(detect(&h, rule).is_none(), "rule {rule} unexpectedly fired");
        }
        let m = find_rule(&h, &RulesConfig::default()).unwrap();
        assert_eq!(m.rule, 9);
        assert_eq!(
            m.payload,
            RulePayload::CoveredAlternative { u: 5, v1: 0, v2: 1, v: 2 }
        );
        let (reduced, entry, delta) = apply_rule(&h, &m).unwrap();
        assert_eq!(delta, 0);
        assert_eq!(entry, TraceEntry::DeleteUb { v: 2 });
        let child = oracle::brute_force_pds(&reduced).unwrap().size().unwrap();
        let original = oracle::brute_force_pds(&h).unwrap().size().unwrap();
        assert_eq!(original, child);
    }

    #[test]
    fn branch_entries_only_add_included_vertices() {
        let trace = vec![
            TraceEntry::Branch { s: 7, included: true },
            TraceEntry::Branch { s: 9, included: false },
        ];
        assert_eq!(reconstruct(&trace, &BTreeSet::new()), BTreeSet::from([7]));
    }

    #[test]
    fn base_case_two_paths() {
        // UB a:{1,2}, b:{2,3}: the covering graph is a path, ν = 1,
        // solution {a, b}.
        let h = BipartiteInstance::from_parts(&[1, 2], &[1, 2, 3], &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        let sol = rule7_solve(&h).unwrap();
        assert_eq!(sol, BTreeSet::from([0, 1]));
        assert_eq!(oracle::brute_force_pds(&h).unwrap().size(), Some(2));
    }

    #[test]
    fn base_case_private_singletons() {
        // Four UD nodes, each with one private degree-1 dominator.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4],
            &[1, 2, 3, 4],
            &[(0, 0), (1, 1), (2, 2), (3, 3)],
        );
        let sol = rule7_solve(&h).unwrap();
        assert_eq!(sol.len(), 4);
    }

    #[test]
    fn base_case_on_six_cycle() {
        let h = gen::six_cycle_instance();
        let mg = build_matching_graph(&h);
        let mate = matching::maximum_matching(&mg.adj);
        let nu = matching::matching_edges(&mate).len();
        assert_eq!(nu, 1);
        let sol = rule7_solve(&h).unwrap();
        assert_eq!(sol.len(), h.ud().len() - nu);
        assert_eq!(sol.len(), 2);
    }

    #[test]
    fn base_case_rejects_high_degree() {
        let h = BipartiteInstance::from_parts(&[1], &[1, 2, 3], &[(0, 0), (0, 1), (0, 2)]);
        assert!(matches!(rule7_solve(&h), Err(ReduceError::Contract(_))));
    }

    #[test]
    fn base_case_matches_oracle_on_random_low_degree_instances() {
        let mut tested = 0;
        for seed in 0..2000 {
            if tested >= 100 {
                break;
            }
            let h = low_degree_instance(seed);
            if h.has_undominatable_node() {
                continue;
            }
            let sol = rule7_solve(&h).unwrap();
            let mg = build_matching_graph(&h);
            let nu = matching::matching_edges(&matching::maximum_matching(&mg.adj)).len();
            assert_eq!(sol.len(), h.ud().len() - nu, "seed {seed}");
            assert_eq!(
                Some(sol.len()),
                oracle::brute_force_pds(&h).unwrap().size(),
                "seed {seed}"
            );
            tested += 1;
        }
        assert!(tested >= 100, "only {tested} feasible instances");
    }

    /// Random instance with every UB degree in {1, 2}.
    fn low_degree_instance(seed: u64) -> BipartiteInstance {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let nb = rng.gen_range(2..=8);
        let nd = rng.gen_range(2..=7);
        let mut edges = BTreeSet::new();
        for b in 0..nb {
            let deg = rng.gen_range(1..=2usize);
            for _ in 0..deg {
                edges.insert((b, rng.gen_range(0..nd)));
            }
        }
        let ub: Vec<usize> = (1..=nb).collect();
        let ud: Vec<usize> = (1..=nd).collect();
        let edges: Vec<_> = edges.into_iter().collect();
        BipartiteInstance::from_parts(&ub, &ud, &edges)
    }
}
