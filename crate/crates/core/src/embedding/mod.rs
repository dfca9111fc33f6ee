//! Spanning trees, path embeddings and their stretch/congestion accounting.

mod augment;
mod decompose;
mod lowstretch;
mod tree;

use std::fmt::Write as _;

pub use augment::{low_congest_augment, AugmentResult};
pub use decompose::{check_decomposition, decompose, TreeDecomposition};
pub use lowstretch::spanning_tree_low_stretch;
pub use tree::{tree_stretch, RootedTree};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};

/// Paths in a host graph, one per vertex pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Embedding {
    pub pairs: Vec<(usize, usize)>,
    pub paths: Vec<Vec<EdgeId>>,
}

impl Embedding {
    pub fn new(pairs: Vec<(usize, usize)>, paths: Vec<Vec<EdgeId>>) -> Result<Self> {
        if pairs.len() != paths.len() {
            return Err(Error::InvalidEmbedding(format!(
                "{} pairs but {} paths",
                pairs.len(),
                paths.len()
            )));
        }
        Ok(Self { pairs, paths })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks that each path joins its pair, is simple, and only uses edges
    /// with `allowed[e]` (all edges when `None`).
    pub fn validate(&self, graph: &Graph, allowed: Option<&[bool]>) -> Result<()> {
        for (z, (&(v, w), path)) in self.pairs.iter().zip(&self.paths).enumerate() {
            let verts = graph.walk_vertices(v, path)?;
            if *verts.last().unwrap() != w {
                return Err(Error::InvalidEmbedding(format!(
                    "path {z} ends at {} instead of {w}",
                    verts.last().unwrap()
                )));
            }
            let mut sorted = verts.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::InvalidEmbedding(format!("path {z} is not simple")));
            }
            if let Some(allowed) = allowed {
                if let Some(&e) = path.iter().find(|&&e| !allowed[e]) {
                    return Err(Error::InvalidEmbedding(format!(
                        "path {z} uses edge {e} outside the target subgraph"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Per-edge load: the summed lengths of all paths through each edge.
    pub fn loads(&self, edge_count: usize) -> Vec<u64> {
        let mut load = vec![0u64; edge_count];
        let mut mark = vec![usize::MAX; edge_count];
        for (z, path) in self.paths.iter().enumerate() {
            let len = path.len() as u64;
            for &e in path {
                // count each path once per edge even if a walk repeats it
                if mark[e] != z {
                    mark[e] = z;
                    load[e] += len;
                }
            }
        }
        load
    }

    /// `max_f sum_{z: f in path(z)} |path(z)|`.
    pub fn congestion(&self, edge_count: usize) -> u64 {
        self.loads(edge_count).into_iter().max().unwrap_or(0)
    }

    /// Debug dump, one `z <v> <w> : e1 e2 ...` line per pair.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (&(v, w), path) in self.pairs.iter().zip(&self.paths) {
            let _ = write!(s, "z {v} {w} :");
            for e in path {
                let _ = write!(s, " {e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Stand-alone form of [`Embedding::congestion`].
pub fn congestion(embedding: &Embedding, edge_count: usize) -> u64 {
    embedding.congestion(edge_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    #[test]
    fn congestion_examples() {
        let g = path_graph(4);
        let e = Embedding::new(vec![(0, 3)], vec![vec![0, 1, 2]]).unwrap();
        e.validate(&g, None).unwrap();
        assert_eq!(e.congestion(g.edge_count()), 3);

        let e = Embedding::new(vec![(0, 2), (1, 4)], vec![vec![0, 1], vec![1, 2, 3]]).unwrap();
        let g = path_graph(5);
        e.validate(&g, None).unwrap();
        assert_eq!(e.congestion(g.edge_count()), 5);
        assert_eq!(e.loads(g.edge_count()), vec![2, 5, 3, 3]);
    }

    #[test]
    fn validate_rejects() {
        let g = path_graph(4);
        assert!(Embedding::new(vec![(0, 2)], vec![vec![0]]).unwrap().validate(&g, None).is_err());
        assert!(Embedding::new(vec![(0, 0)], vec![vec![0, 0]]).unwrap().validate(&g, None).is_err());
        let allowed = [true, false, true];
        assert!(Embedding::new(vec![(0, 2)], vec![vec![0, 1]])
            .unwrap()
            .validate(&g, Some(&allowed))
            .is_err());
    }

    #[test]
    fn dump_format() {
        let e = Embedding::new(vec![(0, 2)], vec![vec![0, 1]]).unwrap();
        assert_eq!(e.dump(), "z 0 2 : 0 1\n");
    }

    proptest! {
        #[test]
        fn congestion_matches_tally(
            n in 3usize..15,
            extra in proptest::collection::vec((0usize..15, 0usize..15), 0..30),
            picks in proptest::collection::vec((0usize..15, 0usize..15), 1..12),
        ) {
            // random connected graph: a path plus chords
            let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            for (a, b) in extra {
                let (a, b) = (a % n, b % n);
                if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
                    edges.push((a, b));
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let all = vec![true; n];
            let mut pairs = Vec::new();
            let mut paths = Vec::new();
            for (a, b) in picks {
                let (a, b) = (a % n, b % n);
                pairs.push((a, b));
                paths.push(g.shortest_path_within(a, b, &all).unwrap());
            }
            let emb = Embedding::new(pairs, paths).unwrap();
            emb.validate(&g, None).unwrap();
            let mut brute = 0u64;
            for f in 0..g.edge_count() {
                let s: u64 = emb.paths.iter().filter(|p| p.contains(&f)).map(|p| p.len() as u64).sum();
                brute = brute.max(s);
            }
            prop_assert_eq!(emb.congestion(g.edge_count()), brute);
        }
    }
}
