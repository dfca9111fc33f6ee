//! Build the fretsaw extension of a grid for a spanning tree of its rigidity
//! graph plus a few extra edges, and show which vertices were split.

use truss_fretsaw::fretsaw::{default_tau, fretsaw, structure_report};
use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::io::format_fretsaw_map;
use truss_fretsaw::truss::rigidity_graph;

fn main() -> truss_fretsaw::Result<()> {
    let truss = gen_grid(4, 4, 0.0, 0)?;
    let q = rigidity_graph(&truss);
    let mut h = q.graph.bfs_tree(0)?;
    let extra: Vec<usize> = (0..q.edge_count()).filter(|e| !h.contains(e)).take(2).collect();
    h.extend(extra);

    let tau = default_tau(&truss)?;
    let ext = fretsaw(&truss, &h, &tau)?;
    println!(
        "{} faces, |H| = {}, {} -> {} vertices",
        q.node_count(),
        h.len(),
        truss.vertex_count(),
        ext.vertex_count()
    );
    for v in 0..truss.vertex_count() {
        let copies = ext.copies(v);
        if copies.len() > 1 {
            println!("vertex {v} split into {copies:?}");
        }
    }
    let report = structure_report(&truss, &q, &ext, &h);
    println!("{}", serde_json::to_string(&report).unwrap());
    print!("{}", format_fretsaw_map(&ext));
    Ok(())
}
