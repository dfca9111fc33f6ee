//! Factor a fretsaw extension in trim order and use the factor to apply the
//! Schur complement preconditioner.

use truss_fretsaw::factor::extra_rigidity_edges;
use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::pipeline::build_preconditioner;
use truss_fretsaw::stiffness::{norm, project_out};

fn main() -> truss_fretsaw::Result<()> {
    let truss = gen_grid(12, 12, 0.15, 9)?;
    for k in [5, 40, 200] {
        let pre = build_preconditioner(&truss, Some(k))?;
        let stats = pre.factor.stats();
        println!(
            "k = {k:3}: m = {}, |S'| = {}, trimmed {} (mean degree {:.2}), core {}, fill {}, dropped pivots {}",
            pre.extension.vertex_count(),
            extra_rigidity_edges(&pre.extension.extended),
            pre.trim.trimmed,
            pre.trim.mean_trim_degree(),
            pre.trim.core_size(),
            stats.fill_nnz,
            stats.dropped_pivots
        );
    }

    let pre = build_preconditioner(&truss, None)?;
    let mut b: Vec<f64> = (0..truss.dof()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
    project_out(&mut b, &pre.null_basis);
    let x = pre.factor.solve_schur(&b)?;
    println!("Schur solve: |x| = {:.4}, |b| = {:.4}", norm(&x), norm(&b));
    println!("{}", serde_json::to_string_pretty(&pre.factor.stats()).unwrap());
    Ok(())
}
