//! Tree decompositions with bounded incident weight.
//!
//! Every host edge has two ends, one at each endpoint, and every end is
//! placed in exactly one part containing its vertex. Parts are built
//! bottom-up over the tree: at each vertex the clusters passed up by its
//! children and the loose edge ends at the vertex are packed first-fit
//! decreasing into bins of capacity `4W/k`. At most one bin is at most half
//! full; that bin, together with the end of the parent edge, travels up as the
//! vertex's cluster. All other bins close at the vertex, which becomes the one
//! vertex they share. Weights are tracked per end, an upper bound on the
//! per-edge weight the invariant asks for.

use serde::Serialize;

use super::tree::RootedTree;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    /// Sorted vertex lists.
    pub parts: Vec<Vec<usize>>,
    /// For every host edge `(a, b)`: the part holding the end at `a` and the
    /// part holding the end at `b`.
    pub assignment: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// One part holding every vertex.
    pub fn trivial(vertex_count: usize, edge_count: usize) -> Self {
        Self {
            parts: vec![(0..vertex_count).collect()],
            assignment: vec![(0, 0); edge_count],
        }
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    /// Total `eta` of the edges with an end in each part, each edge counted
    /// once per part.
    pub fn part_weights(&self, eta: &[u64]) -> Vec<u64> {
        let mut w = vec![0u64; self.parts.len()];
        for (e, &(a, b)) in self.assignment.iter().enumerate() {
            w[a] += eta[e];
            if b != a {
                w[b] += eta[e];
            }
        }
        w
    }

    /// Quotient graph on parts: one edge per distinct pair of parts joined by
    /// a host edge.
    pub fn quotient_edges(&self) -> Vec<(usize, usize)> {
        let mut q: Vec<(usize, usize)> = self
            .assignment
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        q.sort_unstable();
        q.dedup();
        q
    }
}

#[derive(Clone, Copy)]
struct End {
    edge: EdgeId,
    /// 0 for the end at `edges[edge].0`, 1 for the other.
    side: u8,
}

struct Cluster {
    vertex: usize,
    ends: Vec<End>,
    children: Vec<usize>,
    weight: u64,
}

enum Item {
    Bundle { cluster: usize, end: End, weight: u64 },
    Free { end: End, weight: u64 },
}

impl Item {
    fn weight(&self) -> u64 {
        match self {
            Item::Bundle { weight, .. } | Item::Free { weight, .. } => *weight,
        }
    }
}

#[derive(Default)]
struct Bin {
    items: Vec<Item>,
    weight: u64,
}

impl Bin {
    fn has_bundle(&self) -> bool {
        self.items.iter().any(|i| matches!(i, Item::Bundle { .. }))
    }
}

fn end_at(graph: &Graph, e: EdgeId, v: usize) -> End {
    End {
        edge: e,
        side: if graph.edge(e).0 == v { 0 } else { 1 },
    }
}

/// Partitions the vertices of `tree`'s host graph. Requires
/// `1 <= k <= sum(eta)`. Fails with [`Error::PartBudgetExceeded`] when the
/// packing needs more than `k` parts.
pub fn decompose(graph: &Graph, tree: &RootedTree, eta: &[u64], k: u64) -> Result<TreeDecomposition> {
    let total: u64 = eta.iter().sum();
    if k < 1 || k > total {
        return Err(Error::BadK { k, total });
    }
    if eta.len() != graph.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.edge_count(),
            got: eta.len(),
        });
    }
    let n = graph.node_count();
    let (k128, w128) = (k as u128, total as u128);
    let fits = |w: u64| k128 * w as u128 <= 4 * w128;
    let light = |w: u64| k128 * w as u128 <= 2 * w128;

    let mut clusters: Vec<Cluster> = Vec::new();
    let mut passed: Vec<Option<usize>> = vec![None; n];
    let mut part_of_end = vec![[usize::MAX; 2]; graph.edge_count()];
    let mut parts: Vec<Vec<usize>> = Vec::new();

    // closes a bin at v into a new part, or returns its ends for {v}
    let close = |bin: Bin,
                 v: usize,
                 clusters: &Vec<Cluster>,
                 parts: &mut Vec<Vec<usize>>,
                 part_of_end: &mut Vec<[usize; 2]>,
                 singleton: &mut Vec<End>| {
        if !bin.has_bundle() {
            for item in bin.items {
                if let Item::Free { end, .. } = item {
                    singleton.push(end);
                }
            }
            return;
        }
        let id = parts.len();
        let mut verts = vec![v];
        let mut stack = Vec::new();
        for item in bin.items {
            match item {
                Item::Bundle { cluster, end, .. } => {
                    part_of_end[end.edge][end.side as usize] = id;
                    stack.push(cluster);
                }
                Item::Free { end, .. } => part_of_end[end.edge][end.side as usize] = id,
            }
        }
        while let Some(c) = stack.pop() {
            let cl = &clusters[c];
            verts.push(cl.vertex);
            for end in &cl.ends {
                part_of_end[end.edge][end.side as usize] = id;
            }
            stack.extend(&cl.children);
        }
        verts.sort_unstable();
        verts.dedup();
        parts.push(verts);
    };

    for &v in tree.order().iter().rev() {
        let parent_edge = tree.parent_edge(v);
        let mut items = Vec::new();
        let mut singleton: Vec<End> = Vec::new();
        for &(_, e) in graph.neighbors(v) {
            if Some(e) == parent_edge {
                continue;
            }
            let end = end_at(graph, e, v);
            let child = if tree.is_tree_edge(e) {
                Some(graph.other(e, v))
            } else {
                None
            };
            match child.and_then(|c| passed[c]) {
                Some(cluster) => items.push(Item::Bundle {
                    cluster,
                    end,
                    weight: clusters[cluster].weight + eta[e],
                }),
                None if fits(eta[e]) => items.push(Item::Free { end, weight: eta[e] }),
                None => singleton.push(end),
            }
        }
        // first-fit decreasing; the sort is stable so ties keep edge order
        items.sort_by_key(|i| std::cmp::Reverse(i.weight()));
        let mut bins: Vec<Bin> = Vec::new();
        for item in items {
            let w = item.weight();
            match bins.iter_mut().find(|b| fits(b.weight + w)) {
                Some(b) => {
                    b.weight += w;
                    b.items.push(item);
                }
                None => bins.push(Bin {
                    weight: w,
                    items: vec![item],
                }),
            }
        }
        let light_idx = bins.iter().position(|b| light(b.weight));

        let mut up: Option<Cluster> = None;
        if let Some(pe) = parent_edge {
            let x = end_at(graph, pe, v);
            let ex = eta[pe];
            match light_idx {
                Some(li) if fits(bins[li].weight + 2 * ex) => {
                    let bin = bins.swap_remove(li);
                    let mut cl = Cluster {
                        vertex: v,
                        ends: vec![x],
                        children: Vec::new(),
                        weight: bin.weight + ex,
                    };
                    for item in bin.items {
                        match item {
                            Item::Bundle { cluster, end, .. } => {
                                cl.ends.push(end);
                                cl.children.push(cluster);
                            }
                            Item::Free { end, .. } => cl.ends.push(end),
                        }
                    }
                    up = Some(cl);
                }
                None if fits(2 * ex) => {
                    up = Some(Cluster {
                        vertex: v,
                        ends: vec![x],
                        children: Vec::new(),
                        weight: ex,
                    });
                }
                _ => singleton.push(x),
            }
        }
        let before = parts.len();
        for bin in bins {
            close(bin, v, &clusters, &mut parts, &mut part_of_end, &mut singleton);
        }
        let covered = up.is_some() || parts.len() > before;
        if !singleton.is_empty() || !covered {
            let id = parts.len();
            for end in singleton {
                part_of_end[end.edge][end.side as usize] = id;
            }
            parts.push(vec![v]);
        }
        if let Some(cl) = up {
            passed[v] = Some(clusters.len());
            clusters.push(cl);
        }
    }

    if parts.len() as u64 > k {
        return Err(Error::PartBudgetExceeded {
            parts: parts.len(),
            k,
        });
    }
    let assignment = part_of_end.into_iter().map(|[a, b]| (a, b)).collect();
    Ok(TreeDecomposition { parts, assignment })
}

/// Verifies every decomposition invariant, naming the first violation.
pub fn check_decomposition(
    graph: &Graph,
    tree: &RootedTree,
    eta: &[u64],
    k: u64,
    dec: &TreeDecomposition,
) -> Result<()> {
    let bad = |m: String| Err(Error::InvariantViolated(m));
    let n = graph.node_count();
    let c = dec.parts.len();
    if c as u64 > k {
        return bad(format!("{c} parts exceed k = {k}"));
    }
    let mut covered = vec![false; n];
    let mut member = vec![Vec::new(); n];
    for (i, part) in dec.parts.iter().enumerate() {
        if part.is_empty() {
            return bad(format!("part {i} is empty"));
        }
        for &v in part {
            covered[v] = true;
            member[v].push(i);
        }
        // induced tree edges: connected iff exactly |part| - 1 of them
        let inside = |v: usize| dec.parts[i].binary_search(&v).is_ok();
        let induced = part
            .iter()
            .filter(|&&v| v != tree.root() && inside(tree.parent(v)))
            .count();
        if induced + 1 != part.len() {
            return bad(format!("part {i} is not connected in the tree"));
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return bad(format!("vertex {v} is in no part"));
    }
    // pairwise overlap: count shared vertices per part pair
    let mut shared = std::collections::HashMap::new();
    for parts_of_v in &member {
        for a in 0..parts_of_v.len() {
            for b in a + 1..parts_of_v.len() {
                let key = (parts_of_v[a], parts_of_v[b]);
                let count = shared.entry(key).or_insert(0usize);
                *count += 1;
                if *count > 1 {
                    return bad(format!("parts {} and {} share more than one vertex", key.0, key.1));
                }
            }
        }
    }
    if dec.assignment.len() != graph.edge_count() {
        return bad("assignment does not cover every edge".into());
    }
    for (e, &(a, b)) in dec.assignment.iter().enumerate() {
        let (u, v) = graph.edge(e);
        if a >= c || b >= c || dec.parts[a].binary_search(&u).is_err() || dec.parts[b].binary_search(&v).is_err() {
            return bad(format!("edge {e} is assigned to parts not holding its ends"));
        }
    }
    let quotient = Graph::new(c, dec.quotient_edges())?;
    if !quotient.is_planar() {
        return bad("quotient graph is not planar".into());
    }
    let total: u64 = eta.iter().sum();
    for (i, &w) in dec.part_weights(eta).iter().enumerate() {
        if dec.parts[i].len() > 1 && (k as u128) * (w as u128) > 4 * total as u128 {
            return bad(format!("part {i} carries weight {w} above 4/{k} of {total}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> (Graph, RootedTree) {
        let g = Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap();
        let t = RootedTree::new(&g, &(0..n - 1).collect::<Vec<_>>(), 0).unwrap();
        (g, t)
    }

    #[test]
    fn k_one_is_single_part() {
        let (g, t) = path(8);
        let eta = vec![1; 7];
        let d = decompose(&g, &t, &eta, 1).unwrap();
        assert_eq!(d.parts, vec![(0..8).collect::<Vec<_>>()]);
        check_decomposition(&g, &t, &eta, 1, &d).unwrap();
    }

    #[test]
    fn path_of_eight_k_four() {
        let (g, t) = path(8);
        let eta = vec![1; 7];
        let d = decompose(&g, &t, &eta, 4).unwrap();
        assert!(d.part_count() <= 4);
        check_decomposition(&g, &t, &eta, 4, &d).unwrap();
        for (i, w) in d.part_weights(&eta).into_iter().enumerate() {
            if d.parts[i].len() > 1 {
                assert!(w <= 7);
            }
        }
    }

    #[test]
    fn bad_k() {
        let (g, t) = path(4);
        assert!(matches!(decompose(&g, &t, &[1, 1, 1], 0), Err(Error::BadK { .. })));
        assert!(matches!(decompose(&g, &t, &[1, 1, 1], 4), Err(Error::BadK { k: 4, total: 3 })));
    }

    #[test]
    fn grid_rigidity_tree() {
        let truss = crate::generate::gen_grid(4, 4, 0.0, 0).unwrap();
        let q = crate::truss::rigidity_graph(&truss);
        let tree = super::super::spanning_tree_low_stretch(&q.graph).unwrap();
        let t = RootedTree::new(&q.graph, &tree, 0).unwrap();
        let eta: Vec<u64> = (0..q.edge_count()).map(|e| 1 + (e as u64 * 7) % 5).collect();
        let d = decompose(&q.graph, &t, &eta, 5).unwrap();
        check_decomposition(&q.graph, &t, &eta, 5, &d).unwrap();
    }

    #[test]
    fn checker_catches_violations() {
        let (g, t) = path(4);
        let eta = vec![1, 1, 1];
        let good = TreeDecomposition {
            parts: vec![vec![0, 1], vec![1, 2, 3]],
            assignment: vec![(0, 0), (1, 1), (1, 1)],
        };
        check_decomposition(&g, &t, &eta, 3, &good).unwrap();
        let disconnected = TreeDecomposition {
            parts: vec![vec![0, 2], vec![1, 2, 3]],
            assignment: vec![(1, 1), (1, 1), (1, 1)],
        };
        assert!(check_decomposition(&g, &t, &eta, 3, &disconnected).is_err());
        let overlap = TreeDecomposition {
            parts: vec![vec![0, 1, 2], vec![1, 2, 3]],
            assignment: vec![(0, 0), (0, 0), (1, 1)],
        };
        assert!(check_decomposition(&g, &t, &eta, 3, &overlap).is_err());
        let heavy = TreeDecomposition {
            parts: vec![vec![0, 1, 2, 3]],
            assignment: vec![(0, 0); 3],
        };
        assert!(check_decomposition(&g, &t, &[2, 2, 2], 5, &heavy).is_err());
    }

    proptest! {
        #[test]
        fn invariants_on_random_grids(
            rows in 2usize..7,
            cols in 2usize..7,
            seed in 0u64..1000,
            kfrac in 0.05f64..1.0,
        ) {
            use rand::{Rng, SeedableRng};
            let truss = crate::generate::gen_grid(rows, cols, 0.0, 0).unwrap();
            let q = crate::truss::rigidity_graph(&truss);
            let tree = q.graph.bfs_tree((seed as usize) % q.node_count()).unwrap();
            let t = RootedTree::new(&q.graph, &tree, 0).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let eta: Vec<u64> = (0..q.edge_count()).map(|_| rng.gen_range(0..20)).collect();
            let total: u64 = eta.iter().sum();
            prop_assume!(total > 0);
            let k = ((total as f64 * kfrac / 4.0).ceil() as u64).clamp(1, total);
            match decompose(&q.graph, &t, &eta, k) {
                Ok(d) => check_decomposition(&q.graph, &t, &eta, k, &d).unwrap(),
                Err(Error::PartBudgetExceeded { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}
