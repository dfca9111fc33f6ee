//! Iteration counts of plain CG against fretsaw-preconditioned CG as the
//! grid grows.

use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::pipeline::{cg_solve, truss_solve, PipelineConfig};
use truss_fretsaw::stiffness::{assemble, orthonormalize, project_out, rigid_null_basis};

fn main() -> truss_fretsaw::Result<()> {
    let cfg = PipelineConfig::with_eps(1e-8);
    println!("{:>6} {:>8} {:>8}", "n", "cg", "pcg");
    for size in [5, 10, 20, 30] {
        let truss = gen_grid(size, size, 0.1, size as u64)?;
        let a = assemble(&truss)?;
        let mut x: Vec<f64> = (0..truss.dof()).map(|i| (i as f64 * 0.37).sin()).collect();
        project_out(&mut x, &orthonormalize(&rigid_null_basis(&truss)));
        let b = a.matvec(&x)?;
        let (_, plain) = cg_solve(&truss, &b, &cfg)?;
        let (_, pre) = truss_solve(&truss, &b, &cfg)?;
        println!("{:>6} {:>8} {:>8}", truss.vertex_count(), plain.iterations, pre.iterations);
    }
    Ok(())
}
