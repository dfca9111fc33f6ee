//! Spanning tree of a rigidity graph, its stretch, and the extra edges
//! chosen so that every element's face path can be rerouted with bounded
//! congestion.

use truss_fretsaw::embedding::{low_congest_augment, spanning_tree_low_stretch, tree_stretch};
use truss_fretsaw::fretsaw::default_tau;
use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::pipeline::element_embedding;
use truss_fretsaw::truss::rigidity_graph;

fn main() -> truss_fretsaw::Result<()> {
    let truss = gen_grid(8, 8, 0.1, 3)?;
    let q = rigidity_graph(&truss);
    let tree = spanning_tree_low_stretch(&q.graph)?;
    let bfs = q.graph.bfs_tree(0)?;
    println!(
        "{} faces, {} rigidity edges; stretch {} (BFS tree from face 0: {})",
        q.node_count(),
        q.edge_count(),
        tree_stretch(&q.graph, &tree)?,
        tree_stretch(&q.graph, &bfs)?
    );

    let tau = default_tau(&truss)?;
    let (pairs, psi) = element_embedding(&truss, &q, &tau)?;
    for k in [3, 10, 30, 100] {
        let r = low_congest_augment(&q.graph, &tree, &pairs, &psi, k)?;
        println!(
            "k = {k:3}: |S| = {:3}, parts = {:3}, cong(psi) = {}, cong(pi) = {}, certified = {}",
            r.extra_edges.len(),
            r.decomposition.part_count(),
            r.congestion_psi,
            r.congestion_pi,
            r.certified
        );
    }
    Ok(())
}
