//! Preconditioned conjugate gradients for singular PSD systems.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stiffness::{dot, norm, orthonormalize, project_out, SparseSymmetricMatrix};

/// Iterates are re-projected against the null space this often.
pub const REPROJECT_EVERY: usize = 50;

pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = Op x`; both slices have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for SparseSymmetricMatrix {
    fn dim(&self) -> usize {
        SparseSymmetricMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y).expect("operator dimension");
    }
}

impl LinearOperator for nalgebra::DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||b - A x|| / ||b||` for the projected right-hand side.
    pub final_relative_residual: f64,
    pub eps_target: f64,
    /// Condition number of the preconditioned operator estimated from the
    /// CG coefficients.
    pub kappa_estimate: Option<f64>,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `20 sqrt(dim) + 100`.
pub fn default_max_iter(dim: usize) -> usize {
    (20.0 * (dim as f64).sqrt()) as usize + 100
}

/// Solves `A x = b` for `b` projected against `null_basis`, returning `x`
/// with `||x - x*||_A <= eps ||x*||_A` under the estimated condition number.
pub fn pcg_solve(
    a: &dyn LinearOperator,
    precond: &dyn LinearOperator,
    b: &[f64],
    eps: f64,
    max_iter: Option<usize>,
    null_basis: &[Vec<f64>],
) -> Result<(Vec<f64>, SolveReport)> {
    pcg_solve_observed(a, precond, b, eps, max_iter, null_basis, |_, _| {})
}

/// As [`pcg_solve`], calling `observe(k, x_k)` after every iteration.
#[allow(clippy::too_many_arguments)]
pub fn pcg_solve_observed(
    a: &dyn LinearOperator,
    precond: &dyn LinearOperator,
    b: &[f64],
    eps: f64,
    max_iter: Option<usize>,
    null_basis: &[Vec<f64>],
    mut observe: impl FnMut(usize, &[f64]),
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = a.dim();
    for (what, got) in [("rhs", b.len()), ("preconditioner", precond.dim())] {
        if got != n {
            log::debug!("{what} has dimension {got}, operator {n}");
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    let basis = orthonormalize(null_basis);
    let max_iter = max_iter.unwrap_or_else(|| default_max_iter(n));
    let mut rhs = b.to_vec();
    project_out(&mut rhs, &basis);
    let b_norm = norm(&rhs);
    let report = |iterations, x: &[f64], kappa| {
        let mut ax = vec![0.0; n];
        a.apply(x, &mut ax);
        let res: Vec<f64> = rhs.iter().zip(&ax).map(|(p, q)| p - q).collect();
        SolveReport {
            iterations,
            final_relative_residual: if b_norm > 0.0 { norm(&res) / b_norm } else { 0.0 },
            eps_target: eps,
            kappa_estimate: kappa,
            wall_time: start.elapsed().as_secs_f64(),
        }
    };
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        let rep = report(0, &x, None);
        return Ok((x, rep));
    }

    let mut r = rhs.clone();
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    project_out(&mut z, &basis);
    let mut rho = dot(&r, &z);
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::NaNDetected(0));
    }
    let rho0 = rho;
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut kappa = 1.0;

    for k in 1..=max_iter {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq.is_finite() && pq > 0.0) {
            return Err(Error::NaNDetected(k));
        }
        let alpha = rho / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if k % REPROJECT_EVERY == 0 {
            project_out(&mut x, &basis);
            project_out(&mut r, &basis);
        }
        observe(k, &x);
        precond.apply(&r, &mut z);
        project_out(&mut z, &basis);
        let rho_new = dot(&r, &z);
        if !rho_new.is_finite() || rho_new < 0.0 {
            return Err(Error::NaNDetected(k));
        }
        let beta = rho_new / rho;
        alphas.push(alpha);
        betas.push(beta);
        kappa = lanczos_condition(&alphas, &betas);
        let ratio = (rho_new / rho0).sqrt();
        if ratio <= eps / kappa.sqrt() {
            project_out(&mut x, &basis);
            let rep = report(k, &x, Some(kappa));
            return Ok((x, rep));
        }
        rho = rho_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    project_out(&mut x, &basis);
    let rep = report(max_iter, &x, Some(kappa));
    Err(Error::MaxIterExceeded {
        solution: x,
        report: Box::new(rep),
    })
}

/// Ratio of the extreme Ritz values of the Lanczos matrix implied by the CG
/// step lengths `alphas` and ratios `betas` (`betas[j]` updates direction
/// `j + 1`).
pub fn lanczos_condition(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let mut diag = Vec::with_capacity(k);
    let mut off = Vec::with_capacity(k.saturating_sub(1));
    for j in 0..k {
        if j == 0 {
            diag.push(1.0 / alphas[0]);
        } else {
            diag.push(1.0 / alphas[j] + betas[j - 1] / alphas[j - 1]);
            off.push(betas[j - 1].sqrt() / alphas[j - 1]);
        }
    }
    let (lo, hi) = tridiagonal_extremes(&diag, &off);
    if lo > 0.0 {
        (hi / lo).max(1.0)
    } else {
        f64::INFINITY
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let o2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { o2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalue by bisection on Sturm counts.
pub fn tridiagonal_extremes(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let k = diag.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < k { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let find = |target: usize| {
        // smallest x with at least `target` eigenvalues <= x
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if sturm_count(diag, off, m) >= target {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    };
    (find(1), find(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::symmetric_eigen;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn a_norm(a: &DMatrix<f64>, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        (v.transpose() * a * &v)[(0, 0)].max(0.0).sqrt()
    }

    #[test]
    fn exact_preconditioner_one_iteration() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let inv = a.clone().try_inverse().unwrap();
        let (x, rep) = pcg_solve(&a, &inv, &[1.0, 2.0, 3.0], 1e-10, None, &[]).unwrap();
        assert_eq!(rep.iterations, 1);
        let ax = &a * DVector::from_vec(x);
        for (k, v) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((ax[k] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn two_eigenvalues_two_iterations() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let (x, rep) = pcg_solve(&a, &Identity(2), &[1.0, 1.0], 1e-12, None, &[]).unwrap();
        assert!(rep.iterations <= 2);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs() {
        let a = DMatrix::<f64>::identity(4, 4);
        let (x, rep) = pcg_solve(&a, &Identity(4), &[0.0; 4], 1e-8, None, &[]).unwrap();
        assert_eq!(x, vec![0.0; 4]);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn singular_system_stays_in_range() {
        // path Laplacian, null space = constants
        let a = DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        let ones = vec![vec![1.0; 3]];
        let (x, rep) = pcg_solve(&a, &Identity(3), &[1.0, 0.5, -1.0], 1e-10, None, &ones).unwrap();
        assert!(x.iter().sum::<f64>().abs() < 1e-12);
        assert!(rep.final_relative_residual < 1e-9);
    }

    #[test]
    fn max_iter_returns_iterate() {
        let a = DMatrix::from_diagonal(&DVector::from_vec((1..=30).map(|i| i as f64).collect()));
        let b = vec![1.0; 30];
        match pcg_solve(&a, &Identity(30), &b, 1e-12, Some(3), &[]) {
            Err(Error::MaxIterExceeded { solution, report }) => {
                assert_eq!(solution.len(), 30);
                assert_eq!(report.iterations, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indefinite_detected() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(
            pcg_solve(&a, &Identity(2), &[1.0, 1.0], 1e-8, None, &[]),
            Err(Error::NaNDetected(_))
        ));
    }

    #[test]
    fn tridiagonal_extremes_match_dense() {
        let diag = [2.0, 3.0, 1.5, 4.0];
        let off = [0.5, -1.0, 0.25];
        let mut m = DMatrix::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = diag[i];
            if i < 3 {
                m[(i, i + 1)] = off[i];
                m[(i + 1, i)] = off[i];
            }
        }
        let e = symmetric_eigen(&m).0;
        let (lo, hi) = tridiagonal_extremes(&diag, &off);
        assert!((lo - e.min()).abs() < 1e-12);
        assert!((hi - e.max()).abs() < 1e-12);
    }

    #[test]
    fn kappa_estimate_converges_to_spectrum() {
        let d: Vec<f64> = (0..12).map(|i| 1.0 + i as f64).collect();
        let a = DMatrix::from_diagonal(&DVector::from_vec(d));
        let (_, rep) = pcg_solve(&a, &Identity(12), &[1.0; 12], 1e-14, None, &[]).unwrap();
        let k = rep.kappa_estimate.unwrap();
        assert!((k - 12.0).abs() < 1e-6, "{k}");
    }

    #[test]
    fn report_json() {
        let rep = SolveReport {
            iterations: 3,
            final_relative_residual: 1e-9,
            eps_target: 1e-8,
            kappa_estimate: Some(2.0),
            wall_time: 0.5,
        };
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["iterations"], 3);
        assert_eq!(v["kappa_estimate"], 2.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn a_norm_error_is_monotone(dim in 2usize..40, seed in 0u64..10_000) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
            let a = &g * g.transpose() + DMatrix::identity(dim, dim) * 0.1;
            let x_true: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = (&a * DVector::from_column_slice(&x_true)).as_slice().to_vec();
            let mut errs = vec![a_norm(&a, &x_true)];
            let _ = pcg_solve_observed(&a, &Identity(dim), &b, 1e-10, Some(4 * dim), &[], |_, x| {
                let e: Vec<f64> = x.iter().zip(&x_true).map(|(p, q)| p - q).collect();
                errs.push(a_norm(&a, &e));
            });
            let scale = errs[0];
            for w in errs.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * scale, "{:?}", w);
            }
        }
    }
}
