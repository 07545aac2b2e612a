//! Branch-vertex selection.
//!
//! The degree-priority strategy keys on the maximum UB degree `d`. For
//! `d ≥ 4` it either samples a maximum-degree node or, when some UD node is
//! nearly saturated with maximum-degree dominators, picks the dominator
//! with the lexicographically smallest ascending neighbor-degree profile.
//! For `d = 3` it keys on the largest degree seen around the degree-3
//! nodes. Ties always break toward the smallest node id; only case (a)
//! draws from the rng.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::instance::{BipartiteInstance, NodeId, Part};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyOrder {
    Ascending,
    Descending,
}

/// The degrees of `v`'s neighbors, sorted in the requested order.
pub fn degree_key(h: &BipartiteInstance, v: NodeId, order: KeyOrder) -> Vec<usize> {
    let mut key: Vec<usize> = h.neighbors(v).iter().map(|&w| h.degree(w)).collect();
    match order {
        KeyOrder::Ascending => key.sort_unstable(),
        KeyOrder::Descending => key.sort_unstable_by(|a, b| b.cmp(a)),
    }
    key
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub node: NodeId,
    /// True when case (b) had no candidate (or the strategy was invoked
    /// with max degree below 3 under rule ablation) and the maximum-degree
    /// fallback decided instead.
    pub used_fallback: bool,
}

/// Smallest-id node of maximum UB degree. The trivial baseline strategy.
pub fn maxdeg_select(h: &BipartiteInstance) -> NodeId {
    let d = h.max_degree(Part::Ub);
    *h.degree_class(Part::Ub, d)
        .iter()
        .next()
        .expect("nonempty UB")
}

/// The four-case degree-priority selection. UB must be nonempty; with all
/// nine rules active the max UB degree is at least 3 here, because the
/// matching base case consumes everything lower.
pub fn ldpb_select(h: &BipartiteInstance, rng: &mut ChaCha8Rng) -> Selection {
    debug_assert!(!h.ub().is_empty());
    let d = h.max_degree(Part::Ub);
    if d < 3 {
        // Reachable only when the base-case rule is ablated away.
        return Selection { node: maxdeg_select(h), used_fallback: true };
    }
    if d >= 4 {
        let saturated = nearly_saturated_ud(h, d);
        match saturated {
            None => Selection { node: random_of_degree(h, d, rng), used_fallback: false },
            Some(anchor) => {
                let candidates: Vec<NodeId> = h
                    .neighbors(anchor)
                    .iter()
                    .copied()
                    .filter(|&w| h.degree(w) == d)
                    .collect();
                if candidates.is_empty() {
                    Selection { node: random_of_degree(h, d, rng), used_fallback: true }
                } else {
                    let node = candidates
                        .into_iter()
                        .map(|s| (degree_key(h, s, KeyOrder::Ascending), s))
                        .min()
                        .expect("nonempty candidates")
                        .1;
                    Selection { node, used_fallback: false }
                }
            }
        }
    } else {
        let l3: Vec<NodeId> = h.degree_class(Part::Ub, 3).into_iter().collect();
        let max3d = l3
            .iter()
            .flat_map(|&s| h.neighbors(s).iter().map(|&w| h.degree(w)))
            .max()
            .unwrap_or(0);
        let node = if max3d >= 4 {
            // Lexicographically largest descending profile.
            l3.iter()
                .copied()
                .map(|s| (degree_key(h, s, KeyOrder::Descending), std::cmp::Reverse(s)))
                .max()
                .expect("degree class is nonempty at the max degree")
                .1
                 .0
        } else {
            // Most degree-2 UD nodes covered.
            l3.iter()
                .copied()
                .map(|s| {
                    let covered_twos =
                        h.neighbors(s).iter().filter(|&&w| h.degree(w) == 2).count();
                    (covered_twos, std::cmp::Reverse(s))
                })
                .max()
                .expect("degree class is nonempty at the max degree")
                .1
                 .0
        };
        Selection { node, used_fallback: false }
    }
}

/// Smallest-degree UD node whose dominators are all (except possibly one)
/// of maximum degree.
fn nearly_saturated_ud(h: &BipartiteInstance, d: usize) -> Option<NodeId> {
    let mut best: Option<(usize, NodeId)> = None;
    for &v in h.ud() {
        let max_deg_dominators = h.neighbors(v).iter().filter(|&&w| h.degree(w) == d).count();
        if max_deg_dominators + 1 >= h.degree(v) {
            let key = (h.degree(v), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, v)| v)
}

fn random_of_degree(h: &BipartiteInstance, d: usize, rng: &mut ChaCha8Rng) -> NodeId {
    let candidates: Vec<NodeId> = h.degree_class(Part::Ub, d).into_iter().collect();
    candidates[rng.gen_range(0..candidates.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn degree_key_orders_neighbor_degrees() {
        // UB node 0 sees UD nodes of degrees 3, 1, 2.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3],
            &[1, 2, 3],
            &[(0, 0), (0, 1), (0, 2), (1, 0), (2, 0), (1, 2)],
        );
        assert_eq!(degree_key(&h, 0, KeyOrder::Ascending), vec![1, 2, 3]);
        assert_eq!(degree_key(&h, 0, KeyOrder::Descending), vec![3, 2, 1]);
        let isolated = BipartiteInstance::from_parts(&[1], &[], &[]);
        assert_eq!(degree_key(&isolated, 0, KeyOrder::Ascending), Vec::<usize>::new());
    }

    /// Two degree-4 hubs and four degree-2 spokes; no UD node is nearly
    /// saturated with degree-4 dominators.
    fn random_case_instance() -> BipartiteInstance {
        BipartiteInstance::from_parts(
            &[1, 2, 3, 4, 5, 6],
            &[1, 2, 3, 4],
            &[
                (0, 0),
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 0),
                (1, 1),
                (1, 2),
                (1, 3),
                (2, 0),
                (2, 1),
                (3, 1),
                (3, 2),
                (4, 2),
                (4, 3),
                (5, 3),
                (5, 0),
            ],
        )
    }

    #[test]
    fn random_case_picks_a_max_degree_node_deterministically() {
        let h = random_case_instance();
        let a = ldpb_select(&h, &mut rng(3));
        let b = ldpb_select(&h, &mut rng(3));
        assert_eq!(a, b);
        assert!(!a.used_fallback);
        assert!([0, 1].contains(&a.node));
        assert_eq!(h.degree(a.node), 4);
    }

    #[test]
    fn saturated_case_compares_ascending_profiles() {
        // The anchor c (degree 2) is dominated by p and q, both of degree 4.
        // ascend(p) = (2,3,3,4) beats ascend(q) = (2,3,4,4).
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4, 5, 6, 7, 8],
            &[1, 2, 3, 4, 5, 6, 7],
            &[
                (0, 0),
                (0, 1),
                (0, 2),
                (0, 3), // p: c a1 a2 a3
                (1, 0),
                (1, 4),
                (1, 5),
                (1, 6), // q: c b1 b2 b3
                (2, 1),
                (2, 2),
                (2, 3), // f1
                (3, 1),
                (3, 2),
                (3, 3), // f2
                (4, 3),
                (4, 4),
                (4, 5), // f3
                (5, 4),
                (5, 5),
                (5, 6), // f4
                (6, 5),
                (6, 6), // f5
                (7, 6), // f6
            ],
        );
        assert_eq!(h.max_degree(Part::Ub), 4);
        assert_eq!(degree_key(&h, 0, KeyOrder::Ascending), vec![2, 3, 3, 4]);
        assert_eq!(degree_key(&h, 1, KeyOrder::Ascending), vec![2, 3, 4, 4]);
        let sel = ldpb_select(&h, &mut rng(0));
        assert_eq!(sel.node, 0);
        assert!(!sel.used_fallback);
    }

    #[test]
    fn saturated_case_with_no_max_degree_dominator_falls_back() {
        // Append a degree-1 UD node whose lone dominator has degree 2: it is
        // trivially "saturated", but none of its dominators reach degree 4.
        let mut ub: Vec<usize> = (1..=7).collect();
        ub.push(8); // the weak dominator f
        let h = BipartiteInstance::from_parts(
            &ub,
            &[1, 2, 3, 4, 5],
            &[
                (0, 0),
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 0),
                (1, 1),
                (1, 2),
                (1, 3),
                (2, 0),
                (2, 1),
                (3, 1),
                (3, 2),
                (4, 2),
                (4, 3),
                (5, 3),
                (5, 0),
                (7, 4), // f covers c
                (7, 0), // and one hub spoke
            ],
        );
        let sel = ldpb_select(&h, &mut rng(1));
        assert!(sel.used_fallback);
        assert_eq!(h.degree(sel.node), 4);
    }

    #[test]
    fn degree_three_with_heavy_neighbor_maximizes_descending_profile() {
        // All four degree-3 UB nodes see the degree-4 node x; d has the
        // lexicographically largest descending profile (4,3,3).
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4, 5],
            &[1, 2, 3, 4, 5],
            &[
                (0, 0),
                (0, 1),
                (0, 2), // a
                (1, 0),
                (1, 3),
                (1, 4), // b
                (2, 0),
                (2, 1),
                (2, 3), // c
                (3, 0),
                (3, 2),
                (3, 4), // d
                (4, 2),
                (4, 4), // e
            ],
        );
        assert_eq!(h.max_degree(Part::Ub), 3);
        assert_eq!(degree_key(&h, 3, KeyOrder::Descending), vec![4, 3, 3]);
        let sel = ldpb_select(&h, &mut rng(0));
        assert_eq!(sel.node, 3);
        assert!(!sel.used_fallback);
    }

    #[test]
    fn degree_three_low_neighborhood_maximizes_covered_twos() {
        // All degrees at most 3; s covers three degree-2 UD nodes, more than
        // any other UB node.
        let h = BipartiteInstance::from_parts(
            &[1, 2, 3, 4, 5],
            &[1, 2, 3, 4, 5, 6],
            &[
                (0, 0),
                (0, 1),
                (0, 3), // a: p q m
                (1, 2),
                (1, 3),
                (1, 4), // b: r m n
                (2, 3),
                (2, 4),
                (2, 5), // c: m n o
                (3, 0),
                (3, 1),
                (3, 2), // s: p q r
                (4, 4),
                (4, 5), // x: n o
            ],
        );
        assert_eq!(h.max_degree(Part::Ub), 3);
        let sel = ldpb_select(&h, &mut rng(9));
        assert_eq!(sel.node, 3);
        assert!(!sel.used_fallback);
    }

    #[test]
    fn maxdeg_baseline_picks_smallest_id() {
        let h = random_case_instance();
        assert_eq!(maxdeg_select(&h), 0);
    }
}
