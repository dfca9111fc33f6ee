//! Dense generalized eigenvalues of the preconditioned pencil, the
//! condition-number sandwich and the congestion-dilation certificate.

use truss_fretsaw::analysis::fretsaw_certificate;
use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::pipeline::build_preconditioner;
use truss_fretsaw::verify::DenseSystem;

fn main() -> truss_fretsaw::Result<()> {
    for (size, seed) in [(3, 0), (5, 1), (7, 2)] {
        let truss = gen_grid(size, size, 0.2, seed)?;
        let pre = build_preconditioner(&truss, Some(3))?;
        let d = DenseSystem::new(&pre)?;
        let a_bs = truss_fretsaw::analysis::pencil_eigs_dense(&d.a, &d.schur)?;
        let ap_b = truss_fretsaw::analysis::pencil_eigs_dense(&d.a_pad, &d.b)?;
        let cert = fretsaw_certificate(&truss, &pre.extension, &pre.tau)?;
        println!(
            "n = {:3}: lambda_min(A,B_S) = {:.4}, kappa(A,B_S) = {:8.3} <= 2 lambda_max(A',B) = {:8.3}, certificate {:.1}",
            truss.vertex_count(),
            a_bs.lambda_min,
            a_bs.kappa,
            2.0 * ap_b.lambda_max,
            cert.bound
        );
    }
    Ok(())
}
