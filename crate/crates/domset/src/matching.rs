//! Maximum matching in general graphs via blossom contraction.
//!
//! The degree-two covering graph that the matching-based base case builds is
//! not bipartite (it can contain odd cycles), so augmenting-path search has
//! to contract blossoms.

use std::collections::VecDeque;

const NONE: usize = usize::MAX;

/// Maximum-cardinality matching of a simple graph given as adjacency lists.
/// Returns the mate of each vertex. O(V^3).
pub fn maximum_matching(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut mate = vec![NONE; n];
    // Greedy seed shortens the augmenting phase.
    for v in 0..n {
        if mate[v] == NONE {
            if let Some(&w) = adj[v].iter().find(|&&w| mate[w] == NONE && w != v) {
                mate[v] = w;
                mate[w] = v;
            }
        }
    }
    for root in 0..n {
        if mate[root] == NONE {
            augment_from(adj, &mut mate, root);
        }
    }
    mate.into_iter()
        .map(|m| if m == NONE { None } else { Some(m) })
        .collect()
}

/// The matched pairs as `(u, v)` edges with `u < v`.
pub fn matching_edges(mate: &[Option<usize>]) -> Vec<(usize, usize)> {
    mate.iter()
        .enumerate()
        .filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v)))
        .collect()
}

fn augment_from(adj: &[Vec<usize>], mate: &mut [usize], root: usize) -> bool {
    let n = adj.len();
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    used[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut finish = NONE;
    'bfs: while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if base[v] == base[w] || mate[v] == w {
                continue;
            }
            if w == root || (mate[w] != NONE && parent[mate[w]] != NONE) {
                // Odd cycle: contract the blossom around the common base.
                let cur_base = lca(mate, &base, &parent, v, w);
                let mut blossom = vec![false; n];
                mark_path(mate, &base, &mut blossom, &mut parent, v, cur_base, w);
                mark_path(mate, &base, &mut blossom, &mut parent, w, cur_base, v);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur_base;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[w] == NONE {
                parent[w] = v;
                if mate[w] == NONE {
                    finish = w;
                    break 'bfs;
                }
                used[mate[w]] = true;
                queue.push_back(mate[w]);
            }
        }
    }
    if finish == NONE {
        return false;
    }
    // Flip the alternating path back to the root.
    let mut v = finish;
    while v != NONE {
        let pv = parent[v];
        let next = mate[pv];
        mate[v] = pv;
        mate[pv] = v;
        v = next;
    }
    true
}

fn lca(mate: &[usize], base: &[usize], parent: &[usize], a: usize, b: usize) -> usize {
    let mut seen = vec![false; base.len()];
    let mut a = a;
    loop {
        a = base[a];
        seen[a] = true;
        if mate[a] == NONE {
            break;
        }
        a = parent[mate[a]];
    }
    let mut b = b;
    loop {
        b = base[b];
        if seen[b] {
            return b;
        }
        b = parent[mate[b]];
    }
}

fn mark_path(
    mate: &[usize],
    base: &[usize],
    blossom: &mut [bool],
    parent: &mut [usize],
    mut v: usize,
    cur_base: usize,
    mut child: usize,
) {
    while base[v] != cur_base {
        blossom[base[v]] = true;
        blossom[base[mate[v]]] = true;
        parent[v] = child;
        child = mate[v];
        v = parent[mate[v]];
    }
}

/// Pairwise-disjointness check plus the cheap necessary condition that no
/// edge joins two unmatched vertices.
pub fn is_valid_matching(adj: &[Vec<usize>], mate: &[Option<usize>]) -> bool {
    for (u, &m) in mate.iter().enumerate() {
        if let Some(v) = m {
            if v >= adj.len() || mate[v] != Some(u) || !adj[u].contains(&v) {
                return false;
            }
        }
    }
    for (u, ns) in adj.iter().enumerate() {
        if mate[u].is_none() && ns.iter().any(|&w| w != u && mate[w].is_none()) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    fn cardinality(mate: &[Option<usize>]) -> usize {
        mate.iter().flatten().count() / 2
    }

    #[test]
    fn triangle_matches_one_edge() {
        let adj = from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let mate = maximum_matching(&adj);
        assert_eq!(cardinality(&mate), 1);
        assert!(is_valid_matching(&adj, &mate));
    }

    #[test]
    fn four_cycle_matches_two_edges() {
        let adj = from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let mate = maximum_matching(&adj);
        assert_eq!(cardinality(&mate), 2);
        assert_eq!(matching_edges(&mate).len(), 2);
    }

    #[test]
    fn petersen_graph_has_perfect_matching() {
        let g = crate::graph::petersen();
        let adj: Vec<Vec<usize>> = g
            .vertices()
            .map(|v| g.neighbors(v).iter().copied().collect())
            .collect();
        assert_eq!(oracle::brute_force_max_matching(&adj), 5);
        let mate = maximum_matching(&adj);
        assert_eq!(cardinality(&mate), 5);
        assert!(is_valid_matching(&adj, &mate));
    }

    #[test]
    fn odd_blossom_chain() {
        // Two triangles joined by a bridge: maximum matching has 3 edges.
        let adj = from_edges(
            7,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 4)],
        );
        let mate = maximum_matching(&adj);
        assert_eq!(cardinality(&mate), 3);
        assert_eq!(oracle::brute_force_max_matching(&adj), 3);
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..120 {
            let n = rng.gen_range(1..=10);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.35) {
                        edges.push((u, v));
                    }
                }
            }
            let adj = from_edges(n, &edges);
            let mate = maximum_matching(&adj);
            assert!(is_valid_matching(&adj, &mate), "case {case}");
            assert!(
                !oracle::exists_augmenting_path(&adj, &mate),
                "case {case}: augmenting path remains"
            );
            assert_eq!(
                cardinality(&mate),
                oracle::brute_force_max_matching(&adj),
                "case {case}"
            );
        }
    }
}
