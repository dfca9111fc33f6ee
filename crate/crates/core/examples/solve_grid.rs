//! Solve a stiffness system on a jittered grid with the fretsaw
//! preconditioner and check the answer against the known displacement.
//!
//!     cargo run --example solve_grid -- 20 1e-8

use rand::{Rng, SeedableRng};
use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::pipeline::{truss_solve_detailed, PipelineConfig};
use truss_fretsaw::stiffness::{assemble, orthonormalize, project_out, rigid_null_basis};

fn main() -> truss_fretsaw::Result<()> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e-8);

    let truss = gen_grid(size, size, 0.2, 42)?;
    let a = assemble(&truss)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut x_true: Vec<f64> = (0..truss.dof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_out(&mut x_true, &orthonormalize(&rigid_null_basis(&truss)));
    let b = a.matvec(&x_true)?;

    let out = truss_solve_detailed(&truss, &b, &PipelineConfig::with_eps(eps))?;
    let err: Vec<f64> = out.x.iter().zip(&x_true).map(|(p, q)| p - q).collect();
    let rel = (a.quad_form(&err)? / a.quad_form(&x_true)?).sqrt();

    println!("{} vertices, {} elements", truss.vertex_count(), truss.elements().len());
    if let Some(info) = &out.info {
        println!(
            "k = {}, |S| = {}, extension has {} vertices, core {}",
            info.k, info.extra_edges, info.m, info.core_vertices
        );
    }
    println!("{} iterations, relative A-norm error {rel:.3e}", out.report.iterations);
    println!("{}", out.report.to_json());
    Ok(())
}
