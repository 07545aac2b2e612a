//! Simple undirected graphs over dense vertex ids `0..n`.

use std::collections::BTreeSet;

/// Dense vertex index, `0..n`.
pub type VertexId = usize;

/// A finite, undirected, simple graph. No self-loops, no parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<VertexId>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); vertex_count],
            edge_count: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Adds the edge `uv`. Self-loops and duplicates are ignored; returns
    /// whether the edge was actually inserted.
    ///
    /// Panics if `u` or `v` is out of range.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        assert!(u < self.adj.len() && v < self.adj.len(), "vertex out of range");
        if u == v || self.adj[u].contains(&v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edge_count += 1;
        true
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.adj.len() && self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// `N[v] = N(v) ∪ {v}`.
    pub fn closed_neighborhood(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut s = self.adj[v].clone();
        s.insert(v);
        s
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.adj.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Builds a graph from an edge list, ignoring self-loops and duplicates.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut g = Graph::new(vertex_count);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// True iff the graph is connected (the empty graph counts as connected).
    pub fn is_connected(&self) -> bool {
        let n = self.adj.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

/// Path graph `v0 - v1 - ... - v(n-1)`.
pub fn path(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for i in 1..n {
        g.add_edge(i - 1, i);
    }
    g
}

/// Cycle graph on `n >= 3` vertices.
pub fn cycle(n: usize) -> Graph {
    let mut g = path(n);
    if n >= 3 {
        g.add_edge(n - 1, 0);
    }
    g
}

/// Star `K_{1,k}` with the center at vertex 0.
pub fn star(k: usize) -> Graph {
    let mut g = Graph::new(k + 1);
    for i in 1..=k {
        g.add_edge(0, i);
    }
    g
}

/// Complete graph on `n` vertices.
pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v);
        }
    }
    g
}

/// The Petersen graph: outer 5-cycle 0..5, inner pentagram 5..10, spokes i—i+5.
pub fn petersen() -> Graph {
    let mut g = Graph::new(10);
    for i in 0..5 {
        g.add_edge(i, (i + 1) % 5);
        g.add_edge(i, i + 5);
        g.add_edge(5 + i, 5 + (i + 2) % 5);
    }
    g
}
