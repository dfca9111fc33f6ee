use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stiffness::SparseSymmetricMatrix;

/// Largest dimension accepted by the dense oracles.
pub const DENSE_LIMIT: usize = 1024;

/// Eigenvalues at most this fraction of the largest are treated as zero.
pub const NULL_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PencilSpectrum {
    /// Max of `x'Ax / x'Bx` over `x` orthogonal to `null(B)`.
    pub lambda_max: f64,
    /// Min of `x'Ax / x'Bx` over `x` orthogonal to `null(A)`.
    pub lambda_min: f64,
    pub kappa: f64,
    /// `(dim null A, dim null B)`.
    pub null_dims: (usize, usize),
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
/// matrix. Only the lower triangle is read.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let fm = faer::Mat::<f64>::from_fn(n, n, |r, c| m[(r, c)]);
    let e = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigendecomposition converges");
    let (s, u) = (e.S(), e.U());
    let values = DVector::from_fn(n, |k, _| s[k]);
    let vectors = DMatrix::from_fn(n, n, |r, c| u[(r, c)]);
    (values, vectors)
}

/// Eigenvectors of a symmetric matrix whose eigenvalues exceed the null
/// threshold, with those eigenvalues.
fn positive_part(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let (values, vectors) = symmetric_eigen(m);
    let top = values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m.nrows())
        .filter(|&k| top > 0.0 && values[k] > NULL_THRESHOLD * top)
        .collect();
    let mut v = DMatrix::zeros(m.nrows(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        v.set_column(c, &vectors.column(k));
    }
    (v, keep.iter().map(|&k| values[k]).collect())
}

/// Largest eigenvalue of `D^-1/2 V' M V D^-1/2`.
fn reduced_max(m: &DMatrix<f64>, v: &DMatrix<f64>, d: &[f64]) -> f64 {
    if d.is_empty() {
        return 0.0;
    }
    let mut c = v.transpose() * m * v;
    for r in 0..d.len() {
        for s in 0..d.len() {
            c[(r, s)] /= (d[r] * d[s]).sqrt();
        }
    }
    let c = (&c + c.transpose()) * 0.5;
    symmetric_eigen(&c).0.max().max(0.0)
}

/// Dimension of the null space of a symmetric PSD matrix.
pub fn null_space_dim(m: &DMatrix<f64>) -> usize {
    m.nrows() - positive_part(m).1.len()
}

/// Extreme generalized eigenvalues of the pencil `(A, B)`, reducing each
/// side to the positive eigenspace of the other.
pub fn pencil_eigs_dense(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<PencilSpectrum> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.nrows(),
        });
    }
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense(n));
    }
    let (vb, db) = positive_part(b);
    let (va, da) = positive_part(a);
    let lambda_max = reduced_max(a, &vb, &db);
    let inv_min = reduced_max(b, &va, &da);
    let lambda_min = if da.is_empty() {
        0.0
    } else if inv_min > 0.0 {
        1.0 / inv_min
    } else {
        f64::INFINITY
    };
    Ok(PencilSpectrum {
        lambda_max,
        lambda_min,
        kappa: lambda_max / lambda_min,
        null_dims: (n - da.len(), n - db.len()),
    })
}

pub fn pencil_eigs(a: &SparseSymmetricMatrix, b: &SparseSymmetricMatrix) -> Result<PencilSpectrum> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if a.dim() > DENSE_LIMIT {
        return Err(Error::TooLargeForDense(a.dim()));
    }
    pencil_eigs_dense(&a.to_dense(), &b.to_dense())
}

/// `B11 - B12 B22^-1 B12'` where the leading block has dimension `n`.
pub fn schur_complement_dense(b: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    let m = b.nrows();
    if m > DENSE_LIMIT {
        return Err(Error::TooLargeForDense(m));
    }
    if n == m {
        return Ok(b.clone());
    }
    let b11 = b.view((0, 0), (n, n));
    let b12 = b.view((0, n), (n, m - n));
    let b22 = b.view((n, n), (m - n, m - n)).clone_owned();
    let x = match b22.clone().cholesky() {
        Some(ch) => ch.solve(&b12.transpose()),
        None => b22
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InvariantViolated(e.to_string()))?
            * b12.transpose(),
    };
    let s = b11 - b12 * x;
    Ok((&s + s.transpose()) * 0.5)
}
