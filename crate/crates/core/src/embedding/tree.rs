//! Rooted spanning trees with constant-time LCA queries.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

#[derive(Debug, Clone)]
pub struct RootedTree {
    root: usize,
    parent: Vec<usize>,
    parent_edge: Vec<Option<EdgeId>>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// Vertices in breadth-first order from the root.
    order: Vec<usize>,
    in_tree: Vec<bool>,
    first: Vec<usize>,
    euler: Vec<usize>,
    sparse: Vec<Vec<usize>>,
}

impl RootedTree {
    /// Roots the spanning tree `tree_edges` of `graph` at `root`.
    pub fn new(graph: &Graph, tree_edges: &[EdgeId], root: usize) -> Result<Self> {
        let n = graph.node_count();
        if root >= n {
            return Err(Error::NotSpanning(format!("root {root} out of range")));
        }
        if tree_edges.len() + 1 != n {
            return Err(Error::NotSpanning(format!(
                "{} edges cannot span {n} vertices as a tree",
                tree_edges.len()
            )));
        }
        let mut in_tree = vec![false; graph.edge_count()];
        let mut adj = vec![Vec::new(); n];
        for &e in tree_edges {
            if e >= graph.edge_count() || std::mem::replace(&mut in_tree[e], true) {
                return Err(Error::NotSpanning(format!("bad tree edge {e}")));
            }
            let (u, v) = graph.edge(e);
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let mut parent = vec![usize::MAX; n];
        let mut parent_edge = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[root] = true;
        parent[root] = root;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(w, e) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    parent_edge[w] = Some(e);
                    depth[w] = depth[u] + 1;
                    children[u].push(w);
                    order.push(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::NotSpanning("tree edges do not connect every vertex".into()));
        }

        // Euler tour, iteratively
        let mut first = vec![0; n];
        let mut euler = Vec::with_capacity(2 * n);
        euler.push(root);
        let mut stack = vec![(root, 0usize)];
        while let Some((u, next)) = stack.last_mut() {
            let u = *u;
            if *next < children[u].len() {
                let c = children[u][*next];
                *next += 1;
                first[c] = euler.len();
                euler.push(c);
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p);
                }
            }
        }
        let mut sparse = vec![(0..euler.len()).collect::<Vec<_>>()];
        let mut span = 1;
        while 2 * span <= euler.len() {
            let prev = sparse.last().unwrap();
            let row: Vec<usize> = (0..=euler.len() - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[euler[a]] <= depth[euler[b]] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            sparse.push(row);
            span *= 2;
        }
        Ok(Self {
            root,
            parent,
            parent_edge,
            depth,
            children,
            order,
            in_tree,
            first,
            euler,
            sparse,
        })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent of `v`; the root is its own parent.
    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn parent_edge(&self, v: usize) -> Option<EdgeId> {
        self.parent_edge[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Breadth-first order from the root; reversed it is a valid post-order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.in_tree.get(e).copied().unwrap_or(false)
    }

    pub fn tree_edges(&self) -> Vec<EdgeId> {
        (0..self.in_tree.len()).filter(|&e| self.in_tree[e]).collect()
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (self.first[u], self.first[v]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let len = b - a + 1;
        let lvl = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let (x, y) = (self.sparse[lvl][a], self.sparse[lvl][b + 1 - (1 << lvl)]);
        let (x, y) = (self.euler[x], self.euler[y]);
        if self.depth[x] <= self.depth[y] {
            x
        } else {
            y
        }
    }

    /// Number of edges on the tree path between `u` and `v`.
    pub fn distance(&self, u: usize, v: usize) -> usize {
        let w = self.lca(u, v);
        self.depth[u] + self.depth[v] - 2 * self.depth[w]
    }

    /// Tree path from `u` to `v` as edge ids in walk order.
    pub fn path(&self, u: usize, v: usize) -> Vec<EdgeId> {
        let w = self.lca(u, v);
        let mut up = Vec::new();
        let mut x = u;
        while x != w {
            up.push(self.parent_edge[x].expect("non-root"));
            x = self.parent[x];
        }
        let mut down = Vec::new();
        let mut y = v;
        while y != w {
            down.push(self.parent_edge[y].expect("non-root"));
            y = self.parent[y];
        }
        down.reverse();
        up.extend(down);
        up
    }
}

/// `str(T)`: total tree-path length over every edge of `graph`.
pub fn tree_stretch(graph: &Graph, tree_edges: &[EdgeId]) -> Result<u64> {
    if graph.node_count() == 0 {
        return Ok(0);
    }
    let t = RootedTree::new(graph, tree_edges, 0)?;
    Ok(graph
        .edges()
        .iter()
        .map(|&(u, v)| t.distance(u, v) as u64)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    #[test]
    fn lca_on_path_and_star() {
        let g = Graph::new(6, vec![(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)]).unwrap();
        let t = RootedTree::new(&g, &[0, 1, 2, 3, 4], 0).unwrap();
        assert_eq!(t.lca(3, 5), 1);
        assert_eq!(t.lca(2, 3), 2);
        assert_eq!(t.distance(3, 5), 4);
        assert_eq!(t.distance(0, 0), 0);
        let p = t.path(3, 5);
        assert_eq!(g.walk_vertices(3, &p).unwrap(), vec![3, 2, 1, 4, 5]);
    }

    #[test]
    fn lca_matches_naive() {
        let n = 40;
        let edges: Vec<(usize, usize)> = (1..n).map(|v| ((v * 7 + 3) % v, v)).collect();
        let g = Graph::new(n, edges).unwrap();
        let ids: Vec<EdgeId> = (0..n - 1).collect();
        let t = RootedTree::new(&g, &ids, 0).unwrap();
        for u in 0..n {
            for v in 0..n {
                let dist = g.bfs_distances(u)[v];
                assert_eq!(t.distance(u, v), dist);
            }
        }
    }

    #[test]
    fn stretch_examples() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(tree_stretch(&g, &[0, 1, 2]).unwrap(), 3);
        for l in 3..9 {
            let g = cycle(l);
            let tree: Vec<EdgeId> = (0..l - 1).collect();
            assert_eq!(tree_stretch(&g, &tree).unwrap(), 2 * l as u64 - 2);
        }
    }

    #[test]
    fn rejects_non_spanning() {
        let g = cycle(5);
        assert!(matches!(tree_stretch(&g, &[0, 1, 2]), Err(Error::NotSpanning(_))));
        // right count but contains a cycle piece and misses a vertex
        let g = Graph::new(4, vec![(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert!(tree_stretch(&g, &[0, 1, 2]).is_err());
    }
}
