//! Augmenting a spanning tree with a few extra edges so that a given
//! embedding can be rerouted through the tree plus those edges with bounded
//! congestion.

use std::collections::BTreeMap;

use serde::Serialize;

use super::decompose::{check_decomposition, decompose, TreeDecomposition};
use super::tree::RootedTree;
use super::Embedding;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

#[derive(Debug, Clone, Serialize)]
pub struct AugmentResult {
    /// Extra edges, ascending.
    pub extra_edges: Vec<EdgeId>,
    /// Each pair of the input embedding rerouted through tree and extra edges.
    #[serde(skip)]
    pub pi: Embedding,
    /// Rerouted path of every host edge.
    #[serde(skip)]
    pub edge_paths: Vec<Vec<EdgeId>>,
    #[serde(skip)]
    pub eta: Vec<u64>,
    #[serde(skip)]
    pub decomposition: TreeDecomposition,
    /// Part budget actually handed to the decomposition.
    pub k_decompose: u64,
    pub k: u64,
    pub stretch: u64,
    pub congestion_psi: u64,
    pub congestion_pi: u64,
    /// `k * cong(pi) <= 24 * str(T) * cong(psi)`, checked in integers.
    pub certified: bool,
}

/// Picks at most `k` edges `S` outside `tree_edges` and reroutes the
/// embedding `psi` of `pairs` into the tree plus `S`.
pub fn low_congest_augment(
    graph: &Graph,
    tree_edges: &[EdgeId],
    pairs: &[(usize, usize)],
    psi: &[Vec<EdgeId>],
    k: u64,
) -> Result<AugmentResult> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    if !graph.is_planar() {
        return Err(Error::NotPlanar);
    }
    let psi_emb = Embedding::new(pairs.to_vec(), psi.to_vec())?;
    psi_emb.validate(graph, None)?;
    let tree = RootedTree::new(graph, tree_edges, 0)?;

    let tlen: Vec<u64> = graph
        .edges()
        .iter()
        .map(|&(u, v)| tree.distance(u, v) as u64)
        .collect();
    let stretch: u64 = tlen.iter().sum();

    let mut eta = vec![0u64; graph.edge_count()];
    for path in psi {
        let len: u64 = path.iter().map(|&e| tlen[e]).sum();
        for &e in path {
            eta[e] += len;
        }
    }
    let total: u64 = eta.iter().sum();

    let mut k_dec = (k / 3).min(total);
    let decomposition = loop {
        if k_dec == 0 {
            break TreeDecomposition::trivial(graph.node_count(), graph.edge_count());
        }
        match decompose(graph, &tree, &eta, k_dec) {
            Ok(d) => break d,
            Err(Error::PartBudgetExceeded { .. }) => k_dec -= 1,
            Err(e) => return Err(e),
        }
    };
    if k_dec > 0 {
        check_decomposition(graph, &tree, &eta, k_dec, &decomposition)?;
    }

    // cheapest host edge between every pair of parts
    let mut shortcut: BTreeMap<(usize, usize), EdgeId> = BTreeMap::new();
    for (e, &(a, b)) in decomposition.assignment.iter().enumerate() {
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        shortcut
            .entry(key)
            .and_modify(|s| {
                if tlen[e] < tlen[*s] {
                    *s = e;
                }
            })
            .or_insert(e);
    }
    let mut extra_edges: Vec<EdgeId> = shortcut
        .values()
        .copied()
        .filter(|&e| !tree.is_tree_edge(e))
        .collect();
    extra_edges.sort_unstable();
    extra_edges.dedup();
    if extra_edges.len() as u64 > k {
        return Err(Error::InvariantViolated(format!(
            "{} extra edges exceed the budget {k}",
            extra_edges.len()
        )));
    }

    let edge_paths: Vec<Vec<EdgeId>> = (0..graph.edge_count())
        .map(|e| {
            let (v, w) = graph.edge(e);
            let (a, b) = decomposition.assignment[e];
            if a == b {
                return Ok(tree.path(v, w));
            }
            let s = shortcut[&(a.min(b), a.max(b))];
            let (s0, s1) = graph.edge(s);
            let (sa, _) = decomposition.assignment[s];
            // endpoint of s whose end lies in v's part
            let (v2, w2) = if sa == a { (s0, s1) } else { (s1, s0) };
            let mut walk = tree.path(v, v2);
            walk.push(s);
            walk.extend(tree.path(w2, w));
            graph.simplify_walk(v, &walk)
        })
        .collect::<Result<_>>()?;

    let mut pi_paths = Vec::with_capacity(psi.len());
    for (&(z0, _), path) in pairs.iter().zip(psi) {
        let mut walk = Vec::new();
        let mut cur = z0;
        for &e in path {
            let (a, b) = graph.edge(e);
            let mut piece = edge_paths[e].clone();
            if cur == b {
                piece.reverse();
            }
            walk.extend(piece);
            cur = if cur == a { b } else { a };
        }
        pi_paths.push(graph.simplify_walk(z0, &walk)?);
    }
    let pi = Embedding::new(pairs.to_vec(), pi_paths)?;

    let mut allowed = vec![false; graph.edge_count()];
    for e in tree.tree_edges().into_iter().chain(extra_edges.iter().copied()) {
        allowed[e] = true;
    }
    pi.validate(graph, Some(&allowed))?;

    let congestion_psi = psi_emb.congestion(graph.edge_count());
    let congestion_pi = pi.congestion(graph.edge_count());
    let certified =
        (k as u128) * (congestion_pi as u128) <= 24 * (stretch as u128) * (congestion_psi as u128);
    Ok(AugmentResult {
        extra_edges,
        pi,
        edge_paths,
        eta,
        decomposition,
        k_decompose: k_dec,
        k,
        stretch,
        congestion_psi,
        congestion_pi,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::spanning_tree_low_stretch;
    use crate::truss::rigidity_graph;

    fn grid_graph(rows: usize, cols: usize) -> Graph {
        let id = |r: usize, c: usize| r * cols + c;
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    e.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < rows {
                    e.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        Graph::new(rows * cols, e).unwrap()
    }

    #[test]
    fn tree_pairs_route_on_tree() {
        let g = grid_graph(3, 3);
        let tree = g.bfs_tree(0).unwrap();
        let pairs: Vec<(usize, usize)> = tree.iter().map(|&e| g.edge(e)).collect();
        let psi: Vec<Vec<EdgeId>> = tree.iter().map(|&e| vec![e]).collect();
        let r = low_congest_augment(&g, &tree, &pairs, &psi, 6).unwrap();
        for (p, &e) in r.pi.paths.iter().zip(&tree) {
            assert_eq!(p, &vec![e]);
        }
        assert!(r.certified);
    }

    #[test]
    fn off_tree_pair_gets_a_shortcut() {
        // a 6-cycle rooted at 0 with tree path 0-1-2-3-4-5; the pair (0, 5)
        // has tree distance 5
        let g = Graph::new(6, (0..6).map(|i| (i, (i + 1) % 6)).collect()).unwrap();
        let tree: Vec<EdgeId> = (0..5).collect();
        let pairs = vec![(5, 0)];
        let psi = vec![vec![5]];
        let r = low_congest_augment(&g, &tree, &pairs, &psi, 3).unwrap();
        assert_eq!(r.k_decompose, 1);
        // one part: the tree path carries the pair
        assert!(r.extra_edges.is_empty());
        assert_eq!(r.pi.paths[0].len(), 5);

        let r = low_congest_augment(&g, &tree, &pairs, &psi, 30).unwrap();
        assert!(r.decomposition.part_count() > 1);
        assert_eq!(r.extra_edges, vec![5]);
        assert_eq!(r.pi.paths[0], vec![5]);
        assert!(r.extra_edges.len() as u64 <= 30);
    }

    #[test]
    fn rigidity_grid_bound() {
        let truss = crate::generate::gen_grid(7, 7, 0.0, 0).unwrap();
        let q = rigidity_graph(&truss);
        let tree = spanning_tree_low_stretch(&q.graph).unwrap();
        let all = vec![true; q.node_count()];
        let pairs: Vec<(usize, usize)> = q.graph.edges().to_vec();
        let psi: Vec<Vec<EdgeId>> = pairs
            .iter()
            .map(|&(a, b)| q.graph.shortest_path_within(a, b, &all).unwrap())
            .collect();
        let r = low_congest_augment(&q.graph, &tree, &pairs, &psi, 10).unwrap();
        assert!(r.extra_edges.len() <= 10);
        assert!(r.certified, "{} {} {}", r.congestion_pi, r.stretch, r.congestion_psi);
        for (e, p) in r.edge_paths.iter().enumerate() {
            let (v, w) = q.graph.edge(e);
            let t = RootedTree::new(&q.graph, &tree, 0).unwrap();
            assert!(p.len() <= 3 * t.distance(v, w));
        }
    }

    #[test]
    fn non_planar_rejected() {
        let mut k5 = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                k5.push((i, j));
            }
        }
        let g = Graph::new(5, k5).unwrap();
        assert!(matches!(
            low_congest_augment(&g, &[0, 1, 2, 3], &[], &[], 3),
            Err(Error::NotPlanar)
        ));
    }
}
