//! Undirected simple graphs with stable edge identifiers.

use std::collections::VecDeque;

use rustworkx_core::petgraph::graph::UnGraph;
use rustworkx_core::petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, EdgeId)>>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Self-loops and repeated edges are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvariantViolated(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvariantViolated(format!("self-loop at {u}")));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        for list in &adj {
            let mut seen: Vec<usize> = list.iter().map(|&(w, _)| w).collect();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvariantViolated("repeated edge".into()));
            }
        }
        Ok(Self { edges, adj })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Endpoint of `e` opposite to `v`.
    pub fn other(&self, e: EdgeId, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn find_edge(&self, u: usize, v: usize) -> Option<EdgeId> {
        self.adj[u].iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        self.bfs_order(0).len() == n
    }

    /// Connectivity of the subgraph formed by an edge subset over all nodes.
    pub fn subgraph_is_connected(&self, edge_subset: &[EdgeId]) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        let mut uf = UnionFind::<usize>::new(n);
        let mut merges = 0;
        for &e in edge_subset {
            let (u, v) = self.edges[e];
            if uf.union(u, v) {
                merges += 1;
            }
        }
        merges == n - 1
    }

    fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        let mut order = vec![root];
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(w, _) in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
        order
    }

    /// Hop distances from `root` (`usize::MAX` when unreachable).
    pub fn bfs_distances(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(w, _) in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Breadth-first spanning tree rooted at `root`, neighbors scanned in
    /// adjacency order.
    pub fn bfs_tree(&self, root: usize) -> Result<Vec<EdgeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut tree = Vec::with_capacity(n.saturating_sub(1));
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &(w, e) in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    tree.push(e);
                    queue.push_back(w);
                }
            }
        }
        if tree.len() + 1 != n {
            return Err(Error::Disconnected);
        }
        Ok(tree)
    }

    /// Shortest path from `src` to `dst` using only nodes with `allowed[v]`.
    /// Returned as edge ids in walk order.
    pub fn shortest_path_within(
        &self,
        src: usize,
        dst: usize,
        allowed: &[bool],
    ) -> Option<Vec<EdgeId>> {
        if !allowed[src] || !allowed[dst] {
            return None;
        }
        let mut via: Vec<Option<(usize, EdgeId)>> = vec![None; self.node_count()];
        let mut seen = vec![false; self.node_count()];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            if u == dst {
                break;
            }
            for &(w, e) in &self.adj[u] {
                if allowed[w] && !seen[w] {
                    seen[w] = true;
                    via[w] = Some((u, e));
                    queue.push_back(w);
                }
            }
        }
        if !seen[dst] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = dst;
        while let Some((prev, e)) = via[cur] {
            path.push(e);
            cur = prev;
        }
        path.reverse();
        Some(path)
    }

    /// Left-right planarity test.
    pub fn is_planar(&self) -> bool {
        let g = UnGraph::<(), ()>::from_edges(
            self.edges.iter().map(|&(u, v)| (u as u32, v as u32)),
        );
        // from_edges only creates nodes up to the largest endpoint
        let mut g = g;
        while g.node_count() < self.node_count() {
            g.add_node(());
        }
        rustworkx_core::planar::is_planar(&g)
    }

    /// Vertex sequence of a walk given by edge ids starting at `start`.
    /// Fails if consecutive edges do not chain.
    pub fn walk_vertices(&self, start: usize, walk: &[EdgeId]) -> Result<Vec<usize>> {
        let mut verts = Vec::with_capacity(walk.len() + 1);
        verts.push(start);
        let mut cur = start;
        for &e in walk {
            let (a, b) = *self
                .edges
                .get(e)
                .ok_or_else(|| Error::InvalidEmbedding(format!("edge {e} out of range")))?;
            cur = if a == cur {
                b
            } else if b == cur {
                a
            } else {
                return Err(Error::InvalidEmbedding(format!(
                    "edge {e} does not continue the walk at vertex {cur}"
                )));
            };
            verts.push(cur);
        }
        Ok(verts)
    }

    /// Removes cycles from a walk, producing a simple path with the same
    /// endpoints whose edges are a subset of the walk's.
    pub fn simplify_walk(&self, start: usize, walk: &[EdgeId]) -> Result<Vec<EdgeId>> {
        let verts = self.walk_vertices(start, walk)?;
        let mut pos_of = std::collections::HashMap::new();
        let mut out_verts: Vec<usize> = vec![start];
        let mut out_edges: Vec<EdgeId> = Vec::new();
        pos_of.insert(start, 0usize);
        for (step, &e) in walk.iter().enumerate() {
            let v = verts[step + 1];
            if let Some(&p) = pos_of.get(&v) {
                for dropped in out_verts.drain(p + 1..) {
                    pos_of.remove(&dropped);
                }
                out_edges.truncate(p);
            } else {
                pos_of.insert(v, out_verts.len());
                out_verts.push(v);
                out_edges.push(e);
            }
        }
        Ok(out_edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    #[test]
    fn rejects_loops_and_repeats() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn bfs_tree_spans_cycle() {
        let g = cycle(6);
        let t = g.bfs_tree(0).unwrap();
        assert_eq!(t.len(), 5);
        assert!(g.subgraph_is_connected(&t));
    }

    #[test]
    fn restricted_shortest_path() {
        let g = cycle(6);
        let mut allowed = vec![true; 6];
        assert_eq!(g.shortest_path_within(0, 2, &allowed).unwrap().len(), 2);
        allowed[1] = false;
        assert_eq!(g.shortest_path_within(0, 2, &allowed).unwrap().len(), 4);
    }

    #[test]
    fn simplify_removes_backtrack() {
        let g = cycle(6);
        // 0 -> 1 -> 2 -> 1 -> 0 -> 5
        let walk = [0, 1, 1, 0, 5];
        assert_eq!(g.simplify_walk(0, &walk).unwrap(), vec![5]);
    }

    #[test]
    fn planarity() {
        assert!(cycle(5).is_planar());
        let mut k5 = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                k5.push((i, j));
            }
        }
        assert!(!Graph::new(5, k5).unwrap().is_planar());
    }
}
