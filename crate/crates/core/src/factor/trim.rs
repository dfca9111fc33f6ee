//! Trim order: eliminate low-degree vertices of the nonzero graph first,
//! leaving a small core that is ordered by minimum degree.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::truss::{rigidity_graph, Truss};

/// Largest vertex degree allowed while trimming.
pub const D_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrimOrder {
    /// Vertex elimination order: trimmed vertices, then the core.
    pub order: Vec<usize>,
    /// Number of trimmed vertices at the front of `order`.
    pub trimmed: usize,
    /// Degree of each trimmed vertex when it was eliminated.
    pub trim_degrees: Vec<usize>,
}

impl TrimOrder {
    pub fn core(&self) -> &[usize] {
        &self.order[self.trimmed..]
    }

    pub fn core_size(&self) -> usize {
        self.order.len() - self.trimmed
    }

    /// Mean number of neighbouring vertex blocks at elimination over the
    /// trimmed vertices.
    pub fn mean_trim_degree(&self) -> f64 {
        if self.trim_degrees.is_empty() {
            return 0.0;
        }
        self.trim_degrees.iter().sum::<usize>() as f64 / self.trim_degrees.len() as f64
    }
}

/// Minimum-degree elimination on the graph with `vertex_count` vertices and
/// the given edges, with clique fill. Vertices are trimmed while the minimum
/// degree is at most [`D_MAX`]; the rest is the core.
pub fn trim_order_graph(vertex_count: usize, edges: &[(usize, usize)]) -> TrimOrder {
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); vertex_count];
    for &(u, v) in edges {
        if u != v {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    let mut queue: BTreeSet<(usize, usize)> = (0..vertex_count).map(|v| (adj[v].len(), v)).collect();
    let mut order = Vec::with_capacity(vertex_count);
    let mut trim_degrees = Vec::new();
    let mut trimming = true;
    while let Some(&(deg, v)) = queue.iter().next() {
        queue.remove(&(deg, v));
        if trimming && deg > D_MAX {
            trimming = false;
        }
        if trimming {
            trim_degrees.push(deg);
        }
        order.push(v);
        let nbrs: Vec<usize> = adj[v].drain().collect();
        for &a in &nbrs {
            queue.remove(&(adj[a].len(), a));
            adj[a].remove(&v);
        }
        for (x, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[x + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nbrs {
            queue.insert((adj[a].len(), a));
        }
    }
    TrimOrder {
        order,
        trimmed: trim_degrees.len(),
        trim_degrees,
    }
}

/// Trim order on the element graph of a truss.
pub fn trim_order(truss: &Truss) -> TrimOrder {
    let edges: Vec<(usize, usize)> = truss.elements().iter().map(|e| (e.i, e.j)).collect();
    trim_order_graph(truss.vertex_count(), &edges)
}

/// `|S'|`: rigidity edges of the truss beyond a spanning tree.
pub fn extra_rigidity_edges(truss: &Truss) -> usize {
    let q = rigidity_graph(truss);
    (q.edge_count() + 1).saturating_sub(q.node_count())
}
