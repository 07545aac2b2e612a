//! The two-part working instance of the solver.
//!
//! `UB` holds the candidate vertices still available for the solution, `UD`
//! the vertices that still need to be dominated. All edges run between the
//! two parts. Every reduction, bound, and branching step operates on this
//! structure; mutations return fresh copies (copy-on-branch).

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::graph::Graph;

/// Node id in an instance. UB and UD live in one id space but never overlap.
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Ub,
    Ud,
}

/// Where a node came from: a labeled source vertex, or an identification of
/// two earlier nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Label in the source graph or input file.
    Original(usize),
    Merged(NodeId, NodeId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("node {node} is not in the {expected:?} part")]
    WrongPart { node: NodeId, expected: Part },
    #[error("cannot identify node {0} with itself")]
    IdentifySelf(NodeId),
}

/// Per-part index from degree to the set of nodes with that degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeIndex {
    buckets: BTreeMap<usize, BTreeSet<NodeId>>,
}

impl DegreeIndex {
    fn insert(&mut self, node: NodeId, degree: usize) {
        self.buckets.entry(degree).or_default().insert(node);
    }

    fn remove(&mut self, node: NodeId, degree: usize) {
        let bucket = self.buckets.get_mut(&degree).expect("degree bucket exists");
        bucket.remove(&node);
        if bucket.is_empty() {
            self.buckets.remove(&degree);
        }
    }

    fn reindex(&mut self, node: NodeId, old: usize, new: usize) {
        if old != new {
            self.remove(node, old);
            self.insert(node, new);
        }
    }

    pub fn nodes_with_degree(&self, k: usize) -> BTreeSet<NodeId> {
        self.buckets.get(&k).cloned().unwrap_or_default()
    }

    pub fn max_degree(&self) -> usize {
        self.buckets.keys().next_back().copied().unwrap_or(0)
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.buckets.keys().next().copied()
    }
}

/// Bipartite covering instance with cross-part adjacency and degree indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteInstance {
    ub: BTreeSet<NodeId>,
    ud: BTreeSet<NodeId>,
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
    origin: BTreeMap<NodeId, Origin>,
    ub_degrees: DegreeIndex,
    ud_degrees: DegreeIndex,
    edge_count: usize,
    next_id: NodeId,
}

impl BipartiteInstance {
    pub fn empty() -> Self {
        BipartiteInstance {
            ub: BTreeSet::new(),
            ud: BTreeSet::new(),
            adj: BTreeMap::new(),
            origin: BTreeMap::new(),
            ub_degrees: DegreeIndex::default(),
            ud_degrees: DegreeIndex::default(),
            edge_count: 0,
            next_id: 0,
        }
    }

    /// Builds an instance from explicit parts. `edges` are positional pairs
    /// `(ub_index, ud_index)` into the origin slices; UB nodes get ids
    /// `0..nb`, UD nodes `nb..nb+nd`. Duplicate edges collapse.
    pub fn from_parts(
        ub_origins: &[usize],
        ud_origins: &[usize],
        edges: &[(usize, usize)],
    ) -> Self {
        let nb = ub_origins.len();
        let nd = ud_origins.len();
        let mut inst = BipartiteInstance::empty();
        for &label in ub_origins {
            inst.push_node(Part::Ub, Origin::Original(label));
        }
        for &label in ud_origins {
            inst.push_node(Part::Ud, Origin::Original(label));
        }
        for &(bi, di) in edges {
            assert!(bi < nb && di < nd, "edge index out of range");
            inst.link(bi, nb + di);
        }
        inst
    }

    /// The bipartite instance of a whole graph: one UB copy and one UD copy
    /// of every vertex, with the UB copy of `u` adjacent to the UD copy of
    /// `v` iff `v ∈ N[u]`. Closed neighborhoods make a vertex dominate
    /// itself, so the UD copy of `u` has degree `d(u) + 1`.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut inst = BipartiteInstance::empty();
        for v in 0..n {
            inst.push_node(Part::Ub, Origin::Original(v));
        }
        for v in 0..n {
            inst.push_node(Part::Ud, Origin::Original(v));
        }
        for u in 0..n {
            for v in g.closed_neighborhood(u) {
                inst.link(u, n + v);
            }
        }
        inst
    }

    fn push_node(&mut self, part: Part, origin: Origin) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        match part {
            Part::Ub => {
                self.ub.insert(id);
                self.ub_degrees.insert(id, 0);
            }
            Part::Ud => {
                self.ud.insert(id);
                self.ud_degrees.insert(id, 0);
            }
        }
        self.adj.insert(id, BTreeSet::new());
        self.origin.insert(id, origin);
        id
    }

    /// Inserts the edge if absent; both endpoints must exist in opposite parts.
    fn link(&mut self, ub_node: NodeId, ud_node: NodeId) {
        debug_assert!(self.ub.contains(&ub_node) && self.ud.contains(&ud_node));
        let inserted = self.adj.get_mut(&ub_node).unwrap().insert(ud_node);
        if !inserted {
            return;
        }
        self.adj.get_mut(&ud_node).unwrap().insert(ub_node);
        self.edge_count += 1;
        let db = self.adj[&ub_node].len();
        let dd = self.adj[&ud_node].len();
        self.ub_degrees.reindex(ub_node, db - 1, db);
        self.ud_degrees.reindex(ud_node, dd - 1, dd);
    }

    fn remove_node(&mut self, node: NodeId) {
        let neighbors = self.adj.remove(&node).expect("node exists");
        let part = if self.ub.remove(&node) {
            self.ub_degrees.remove(node, neighbors.len());
            Part::Ub
        } else {
            assert!(self.ud.remove(&node), "node in neither part");
            self.ud_degrees.remove(node, neighbors.len());
            Part::Ud
        };
        self.edge_count -= neighbors.len();
        let other_index = match part {
            Part::Ub => &mut self.ud_degrees,
            Part::Ud => &mut self.ub_degrees,
        };
        for w in neighbors {
            let ws = self.adj.get_mut(&w).expect("neighbor exists");
            ws.remove(&node);
            other_index.reindex(w, ws.len() + 1, ws.len());
        }
        self.origin.remove(&node);
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.adj.contains_key(&node)
    }

    pub fn part_of(&self, node: NodeId) -> Option<Part> {
        if self.ub.contains(&node) {
            Some(Part::Ub)
        } else if self.ud.contains(&node) {
            Some(Part::Ud)
        } else {
            None
        }
    }

    pub fn ub(&self) -> &BTreeSet<NodeId> {
        &self.ub
    }

    pub fn ud(&self) -> &BTreeSet<NodeId> {
        &self.ud
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: NodeId) -> &BTreeSet<NodeId> {
        &self.adj[&node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[&node].len()
    }

    pub fn origin(&self, node: NodeId) -> &Origin {
        &self.origin[&node]
    }

    /// `L_k` of a part: the nodes currently having degree exactly `k`.
    pub fn degree_class(&self, part: Part, k: usize) -> BTreeSet<NodeId> {
        self.degree_index(part).nodes_with_degree(k)
    }

    pub fn degree_index(&self, part: Part) -> &DegreeIndex {
        match part {
            Part::Ub => &self.ub_degrees,
            Part::Ud => &self.ud_degrees,
        }
    }

    pub fn max_degree(&self, part: Part) -> usize {
        self.degree_index(part).max_degree()
    }

    /// A UD node with no remaining dominator makes the instance infeasible.
    pub fn has_undominatable_node(&self) -> bool {
        !self.ud.is_empty() && self.ud_degrees.min_degree() == Some(0)
    }

    fn expect_part(&self, node: NodeId, part: Part) -> Result<(), InstanceError> {
        if !self.contains(node) {
            return Err(InstanceError::UnknownNode(node));
        }
        if self.part_of(node) != Some(part) {
            return Err(InstanceError::WrongPart { node, expected: part });
        }
        Ok(())
    }

    /// Returns a copy with the given nodes and their incident edges removed.
    pub fn delete_nodes(
        &self,
        ub_del: &BTreeSet<NodeId>,
        ud_del: &BTreeSet<NodeId>,
    ) -> Result<Self, InstanceError> {
        for &v in ub_del {
            self.expect_part(v, Part::Ub)?;
        }
        for &v in ud_del {
            self.expect_part(v, Part::Ud)?;
        }
        let mut out = self.clone();
        for &v in ub_del.iter().chain(ud_del) {
            out.remove_node(v);
        }
        Ok(out)
    }

    /// `H − v` for a single node of either part.
    pub fn delete_node(&self, node: NodeId) -> Result<Self, InstanceError> {
        if !self.contains(node) {
            return Err(InstanceError::UnknownNode(node));
        }
        let mut out = self.clone();
        out.remove_node(node);
        Ok(out)
    }

    /// `H − N[v]`: removes `v` and all its cross-part neighbors.
    pub fn delete_closed(&self, node: NodeId) -> Result<Self, InstanceError> {
        if !self.contains(node) {
            return Err(InstanceError::UnknownNode(node));
        }
        let mut out = self.clone();
        for w in self.adj[&node].clone() {
            out.remove_node(w);
        }
        out.remove_node(node);
        Ok(out)
    }

    /// Replaces `a` and `b` (same part) by a fresh node adjacent to
    /// `N(a) ∪ N(b)`; duplicate edges collapse. Returns the new instance and
    /// the identified node's id.
    pub fn identify(
        &self,
        part: Part,
        a: NodeId,
        b: NodeId,
    ) -> Result<(Self, NodeId), InstanceError> {
        if a == b {
            return Err(InstanceError::IdentifySelf(a));
        }
        self.expect_part(a, part)?;
        self.expect_part(b, part)?;
        let merged: BTreeSet<NodeId> = self.adj[&a].union(&self.adj[&b]).copied().collect();
        let mut out = self.clone();
        out.remove_node(a);
        out.remove_node(b);
        let s = out.push_node(part, Origin::Merged(a, b));
        for w in merged {
            match part {
                Part::Ub => out.link(s, w),
                Part::Ud => out.link(w, s),
            }
        }
        Ok((out, s))
    }

    /// Recomputes every invariant from the adjacency lists. Test support.
    pub fn check_consistency(&self) {
        assert!(self.ub.is_disjoint(&self.ud), "parts overlap");
        let mut edges = 0;
        for (&v, ns) in &self.adj {
            let part = self.part_of(v).expect("node in a part");
            for &w in ns {
                assert!(self.adj[&w].contains(&v), "asymmetric edge {v}-{w}");
                assert_ne!(self.part_of(w), Some(part), "intra-part edge {v}-{w}");
            }
            edges += ns.len();
            let idx = self.degree_index(part);
            assert!(
                idx.nodes_with_degree(ns.len()).contains(&v),
                "degree index stale for {v}"
            );
        }
        assert_eq!(edges, 2 * self.edge_count, "edge count mismatch");
        let indexed: usize = self
            .ub_degrees
            .buckets
            .values()
            .chain(self.ud_degrees.buckets.values())
            .map(BTreeSet::len)
            .sum();
        assert_eq!(indexed, self.adj.len(), "degree buckets do not partition nodes");
    }
}
