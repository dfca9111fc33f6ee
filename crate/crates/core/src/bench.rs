//! Benchmark sweep over grid sizes and edge budgets.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{pencil_eigs_dense, schur_complement_dense, DENSE_LIMIT};
use crate::error::Result;
use crate::generate::gen_grid;
use crate::pipeline::{build_preconditioner, cg_solve, clamp_k, default_k, solve_with, PipelineConfig};
use crate::stiffness::{orthonormalize, project_out, rigid_null_basis};

/// Fractions of the clamped `default_k` tried per size. At desk scale
/// `default_k` already exceeds the face count, so larger multiples add
/// nothing.
pub const K_FACTORS: [f64; 4] = [0.125, 0.25, 0.5, 1.0];

pub const CSV_HEADER: &str = "n,m,k,core,iters,kappa_oracle,seconds";

/// One solve. Rows with `k == 0` are unpreconditioned CG.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub core: usize,
    pub iters: usize,
    /// Dense condition number of the preconditioned pencil, when small
    /// enough to compute.
    pub kappa_oracle: Option<f64>,
    pub seconds: f64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        let kappa = self.kappa_oracle.map(|k| format!("{k:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{:.6}",
            self.n, self.m, self.k, self.core, self.iters, kappa, self.seconds
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// For each size `s`, solves on an `s x s` grid with unpreconditioned CG and
/// with the fretsaw preconditioner at each budget in [`K_FACTORS`].
pub fn run_bench(sizes: &[usize], eps: f64, seed: u64, with_oracle: bool) -> Result<Vec<BenchRow>> {
    let cfg = PipelineConfig {
        eps,
        seed,
        ..PipelineConfig::default()
    };
    let mut rows = Vec::new();
    for &s in sizes {
        let truss = gen_grid(s, s, 0.1, seed)?;
        let n = truss.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<f64> = (0..truss.dof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_out(&mut x, &orthonormalize(&rigid_null_basis(&truss)));
        let a = crate::stiffness::assemble(&truss)?;
        let b = a.matvec(&x)?;

        let start = Instant::now();
        let (_, rep) = cg_solve(&truss, &b, &cfg)?;
        let seconds = start.elapsed().as_secs_f64();
        let kappa = if with_oracle && a.dim() <= DENSE_LIMIT {
            let d = a.to_dense();
            Some(pencil_eigs_dense(&d, &nalgebra::DMatrix::identity(d.nrows(), d.nrows()))?.kappa)
        } else {
            None
        };
        rows.push(BenchRow {
            n,
            m: n,
            k: 0,
            core: 0,
            iters: rep.iterations,
            kappa_oracle: kappa,
            seconds,
        });

        let faces = truss.faces().len();
        let base = clamp_k(default_k(n), faces);
        let mut ks: Vec<usize> = K_FACTORS
            .iter()
            .map(|f| clamp_k((base as f64 * f).round() as usize, faces))
            .collect();
        ks.dedup();
        for k in ks {
            let start = Instant::now();
            let pre = build_preconditioner(&truss, Some(k))?;
            let out = solve_with(&pre, &b, &cfg)?;
            let seconds = start.elapsed().as_secs_f64();
            let kappa = if with_oracle && pre.b.dim() <= DENSE_LIMIT {
                let schur = schur_complement_dense(&pre.b.to_dense(), a.dim())?;
                Some(pencil_eigs_dense(&a.to_dense(), &schur)?.kappa)
            } else {
                None
            };
            rows.push(BenchRow {
                n,
                m: pre.extension.vertex_count(),
                k,
                core: pre.trim.core_size(),
                iters: out.report.iterations,
                kappa_oracle: kappa,
                seconds,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep() {
        let rows = run_bench(&[4], 1e-8, 0, true).unwrap();
        assert!(rows.len() >= 2);
        assert_eq!(rows[0].k, 0);
        for r in &rows[1..] {
            assert!(r.iters <= rows[0].iters);
            assert!(r.kappa_oracle.unwrap() >= 1.0);
        }
        let csv = to_csv(&rows);
        assert!(csv.starts_with("n,m,k,core,iters,kappa_oracle,seconds\n16,16,0,0,"));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }
}
