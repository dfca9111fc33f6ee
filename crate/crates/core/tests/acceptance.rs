//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when any
//! criterion fails.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use truss_fretsaw::analysis::{
    fretsaw_certificate, null_space_dim, path_lemma_experiment, pencil_eigs_dense, symmetric_eigen,
    CongestionCertificate, PencilSpectrum,
};
use truss_fretsaw::factor::extra_rigidity_edges;
use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::pipeline::{build_preconditioner, cg_solve, solve_with, PipelineConfig, Preconditioner};
use truss_fretsaw::stiffness::{norm, orthonormalize, project_out, rigid_null_basis};
use truss_fretsaw::verify::{sandwich_violation, DenseSystem, PROBES, SCHUR_PROBES};
use truss_fretsaw::Truss;

const SIZES: [usize; 4] = [3, 5, 10, 15];
const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const JITTER: f64 = 0.2;
/// A deliberately small edge budget next to the default one, so that the
/// extensions split many vertices.
const SMALL_K: usize = 3;

struct Instance {
    label: String,
    truss: Truss,
    pre: Preconditioner,
    dense: DenseSystem,
    a_bs: PencilSpectrum,
    ap_b: PencilSpectrum,
    cert: CongestionCertificate,
}

fn instance(size: usize, seed: u64, k: Option<usize>) -> Instance {
    let truss = gen_grid(size, size, JITTER, seed).unwrap();
    let pre = build_preconditioner(&truss, k).unwrap();
    let dense = DenseSystem::new(&pre).unwrap();
    let a_bs = pencil_eigs_dense(&dense.a, &dense.schur).unwrap();
    let ap_b = pencil_eigs_dense(&dense.a_pad, &dense.b).unwrap();
    let cert = fretsaw_certificate(&truss, &pre.extension, &pre.tau).unwrap();
    Instance {
        label: format!("n={} seed={} k={}", truss.vertex_count(), seed, pre.k),
        truss,
        pre,
        dense,
        a_bs,
        ap_b,
        cert,
    }
}

struct Outcome {
    failures: usize,
}

impl Outcome {
    fn report(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn worst<T>(items: &[T], f: impl Fn(&T) -> f64) -> (f64, usize) {
    items
        .iter()
        .enumerate()
        .map(|(i, x)| (f(x), i))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

fn a_norm(pre: &Preconditioner, x: &[f64]) -> f64 {
    pre.a.quad_form(x).unwrap().max(0.0).sqrt()
}

fn range_projector(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (values, vectors) = symmetric_eigen(m);
    let top = values.max();
    let mut p = DMatrix::identity(m.nrows(), m.nrows());
    for (k, &l) in values.iter().enumerate() {
        if l <= 1e-9 * top {
            let v = vectors.column(k);
            p -= v * v.transpose();
        }
    }
    p
}

fn main() {
    let mut out = Outcome { failures: 0 };

    let start = Instant::now();
    let mut grid = Vec::new();
    for &size in &SIZES {
        for &seed in &SEEDS {
            grid.push(instance(size, seed, Some(SMALL_K)));
            grid.push(instance(size, seed, None));
        }
    }
    let oracle_seconds = start.elapsed().as_secs_f64();

    // fretsaw lower bound
    let (gap, at) = worst(&grid, |i| 0.5 - 1e-9 - i.a_bs.lambda_min);
    out.report(
        "fretsaw-lower-bound",
        gap <= 0.0 && oracle_seconds <= 60.0,
        format!(
            "min lambda_min(A,B_S) = {:.6} ({}) over {} instances, oracle time {:.1}s",
            0.5 - 1e-9 - gap,
            grid[at].label,
            grid.len(),
            oracle_seconds
        ),
    );

    // condition-number sandwich
    let (excess, at) = worst(&grid, |i| i.a_bs.kappa / (2.0 * i.ap_b.lambda_max) - 1.0);
    let (mismatch, at2) = worst(&grid, |i| {
        (i.ap_b.lambda_max - i.a_bs.lambda_max).abs() / i.ap_b.lambda_max
    });
    out.report(
        "condition-sandwich",
        excess <= 1e-6 && mismatch <= 1e-6,
        format!(
            "max kappa/(2 lambda_max(A',B)) - 1 = {excess:.3e} ({}); max |lambda_max(A',B) - lambda_max(A,B_S)| rel = {mismatch:.3e} ({})",
            grid[at].label, grid[at2].label
        ),
    );

    // congestion-dilation certificate and embedding bound
    let (cert_gap, at) = worst(&grid, |i| i.ap_b.lambda_max / i.cert.bound - 1.0);
    let embed_ok = grid.iter().all(|i| {
        let a = &i.pre.augment;
        (a.k as u128) * (a.congestion_pi as u128) <= 24 * (a.stretch as u128) * (a.congestion_psi as u128)
    });
    out.report(
        "congestion-dilation",
        cert_gap <= 1e-6 && embed_ok,
        format!(
            "max lambda_max(A',B)/bound - 1 = {cert_gap:.3e} ({}); integer embedding bound holds on all: {embed_ok}",
            grid[at].label
        ),
    );

    // path lemma scaling
    let start = Instant::now();
    let mut slopes = Vec::new();
    let mut ratios = Vec::new();
    for (jitter, seed) in [(0.0, 0), (0.2, 1), (0.3, 2)] {
        let t = path_lemma_experiment(&[4, 8, 16, 32, 64], jitter, seed).unwrap();
        slopes.push(t.slope);
        ratios.push(t.max_ratio());
    }
    let path_seconds = start.elapsed().as_secs_f64();
    let max_slope = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_ratio = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    out.report(
        "path-lemma-scaling",
        max_slope <= 3.3 && max_ratio <= 10.4 && path_seconds <= 30.0,
        format!("slopes {slopes:.3?}, max doubling ratio {max_ratio:.3}, {path_seconds:.2}s"),
    );

    // fretsaw structure
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut structure_ok = true;
    let mut worst_sandwich: f64 = 0.0;
    for i in &grid {
        let s = &i.pre.structure;
        structure_ok &= s.h_subset_of_q && s.extra_edges <= s.k && s.stiffly_connected;
        let v = sandwich_violation(&i.pre.a, &i.pre.b, &i.pre.extension, PROBES, &mut rng).unwrap();
        worst_sandwich = worst_sandwich.max(v);
    }
    out.report(
        "fretsaw-structure",
        structure_ok && worst_sandwich <= 1e-10,
        format!(
            "H' in Q', |Q'-H'| <= k, stiffly connected: {structure_ok}; worst A <= MBM' <= 2A violation {worst_sandwich:.3e}"
        ),
    );

    // Schur solve correctness
    let mut worst_schur: f64 = 0.0;
    let mut count = 0;
    for i in grid.iter().filter(|i| i.pre.b.dim() <= 400) {
        count += 1;
        for _ in 0..SCHUR_PROBES {
            let mut b: Vec<f64> = (0..i.pre.a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            project_out(&mut b, &i.pre.null_basis);
            let x = i.pre.factor.solve_schur(&b).unwrap();
            let r = &i.dense.schur * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
            worst_schur = worst_schur.max(r.norm() / norm(&b));
        }
    }
    out.report(
        "schur-solve",
        count > 0 && worst_schur <= 1e-8,
        format!("max |B_S x - b|/|b| = {worst_schur:.3e} over {count} instances x {SCHUR_PROBES} loads"),
    );

    // null space
    let mut dims_ok = true;
    let mut worst_res: f64 = 0.0;
    for i in &grid {
        dims_ok &= null_space_dim(&i.dense.a) == 3 && null_space_dim(&i.dense.schur) == 3;
        dims_ok &= i.a_bs.null_dims == (3, 3);
        let scale = i.pre.a.frobenius_norm();
        for v in rigid_null_basis(&i.truss) {
            worst_res = worst_res.max(norm(&i.pre.a.matvec(&v).unwrap()) / (scale * norm(&v)));
        }
    }
    out.report(
        "null-space",
        dims_ok && worst_res <= 1e-10,
        format!("dim null(A) = dim null(B_S) = 3 on all: {dims_ok}; max rigid residual {worst_res:.3e}"),
    );

    // end-to-end solve, including the 20 x 20 grid
    let mut e2e_ok = true;
    let mut lines = Vec::new();
    let big = instance(20, 0, None);
    let e2e: Vec<&Instance> = grid
        .iter()
        .filter(|i| i.pre.k != SMALL_K && i.label.contains("seed=0"))
        .chain(grid.iter().filter(|i| i.pre.k == SMALL_K && i.label.contains("seed=1")))
        .chain(std::iter::once(&big))
        .collect();
    for i in &e2e {
        let mut x: Vec<f64> = (0..i.truss.dof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_out(&mut x, &orthonormalize(&rigid_null_basis(&i.truss)));
        let b = i.pre.a.matvec(&x).unwrap();
        for eps in [1e-4f64, 1e-8] {
            let bound = 10.0 * i.a_bs.kappa.sqrt() * (2.0 / eps).ln();
            let mut cfg = PipelineConfig::with_eps(eps);
            if i.pre.k == SMALL_K {
                // a deliberately weak preconditioner: allow the full bound
                cfg.max_iter = Some(bound.ceil() as usize + 1);
            }
            let o = match solve_with(&i.pre, &b, &cfg) {
                Ok(o) => o,
                Err(e) => {
                    e2e_ok = false;
                    lines.push(format!("{} eps={eps:e}: {e}", i.label));
                    continue;
                }
            };
            let d: Vec<f64> = x.iter().zip(&o.x).map(|(p, q)| p - q).collect();
            let rel = a_norm(&i.pre, &d) / a_norm(&i.pre, &x);
            let ok = rel <= eps && (o.report.iterations as f64) <= bound;
            e2e_ok &= ok;
            if !ok || i.truss.vertex_count() == 400 {
                lines.push(format!(
                    "{} eps={eps:e}: err {rel:.2e}, {} iters <= {bound:.0}",
                    i.label, o.report.iterations
                ));
            }
        }
    }
    out.report(
        "end-to-end",
        e2e_ok,
        format!("{} instances x 2 eps; {}", e2e.len(), lines.join("; ")),
    );

    // preconditioning benefit
    let mut x: Vec<f64> = (0..big.truss.dof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_out(&mut x, &big.pre.null_basis);
    let b = big.pre.a.matvec(&x).unwrap();
    let cfg = PipelineConfig::with_eps(1e-8);
    let pcg = solve_with(&big.pre, &b, &cfg).map_or(usize::MAX, |o| o.report.iterations);
    let plain = PipelineConfig {
        max_iter: Some(100_000),
        ..cfg.clone()
    };
    let cg = cg_solve(&big.truss, &b, &plain).map_or(usize::MAX, |r| r.1.iterations);
    out.report(
        "preconditioning-benefit",
        pcg < cg,
        format!("20x20 grid: {pcg} preconditioned vs {cg} plain iterations"),
    );

    // Cholesky reconstruction
    let mut worst_recon: f64 = 0.0;
    let mut pivots_ok = true;
    let mut core_ok = true;
    for i in grid.iter().chain(std::iter::once(&big)) {
        let p = range_projector(&i.dense.b);
        let r = &p * i.pre.factor.reconstruct_dense() * &p;
        let bp = &p * &i.dense.b * &p;
        worst_recon = worst_recon.max((r - &bp).norm() / bp.norm());
        pivots_ok &= i.pre.factor.stats().dropped_pivots == 3;
        core_ok &= i.pre.trim.core_size() <= 8 * extra_rigidity_edges(&i.pre.extension.extended);
    }
    out.report(
        "cholesky-reconstruction",
        worst_recon <= 1e-10 && pivots_ok && core_ok,
        format!(
            "max relative error on range(B) {worst_recon:.3e}; 3 dropped pivots on all: {pivots_ok}; core <= 8|S'| on all: {core_ok}"
        ),
    );

    if out.failures > 0 {
        println!("{} criteria failed", out.failures);
        std::process::exit(1);
    }
}
