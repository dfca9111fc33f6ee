//! Sparse Cholesky factorization in trim order and Schur-complement solves.

mod cholesky;
mod trim;

pub use cholesky::{factorize, project_range, CholeskyFactor, FactorStats, DROP_TOL, RANGE_TOL};
pub use trim::{extra_rigidity_edges, trim_order, trim_order_graph, TrimOrder, D_MAX};

use crate::error::Result;
use crate::pcg::LinearOperator;
use crate::stiffness::{assemble, project_out, SparseSymmetricMatrix};
use crate::truss::Truss;

/// Interleaved dof order `(2v, 2v+1)` for a vertex order.
pub fn dof_order(vertex_order: &[usize]) -> Vec<usize> {
    vertex_order.iter().flat_map(|&v| [2 * v, 2 * v + 1]).collect()
}

/// [`dof_order`] with the two dofs of the second-to-last vertex swapped
/// when that makes the final three dofs a better-conditioned complement of
/// the rigid motions. Those three carry the null pivots; keeping `x_u` last
/// among `u`'s dofs pins rotation through `y_w - y_u`, and `y_u` through
/// `x_w - x_u`.
pub fn truss_dof_order(truss: &Truss, vertex_order: &[usize]) -> Vec<usize> {
    let mut dofs = dof_order(vertex_order);
    let n = vertex_order.len();
    if n >= 2 {
        let d = truss.position(vertex_order[n - 1]) - truss.position(vertex_order[n - 2]);
        if d.y.abs() > d.x.abs() {
            dofs.swap(2 * n - 4, 2 * n - 3);
        }
    }
    dofs
}

/// Assembles and factors the stiffness matrix of `truss` in trim order.
pub fn factorize_truss(truss: &Truss) -> Result<(SparseSymmetricMatrix, TrimOrder, CholeskyFactor)> {
    let b = assemble(truss)?;
    let trim = trim_order(truss);
    let f = factorize(&b, &truss_dof_order(truss, &trim.order), trim.core_size())?;
    Ok((b, trim, f))
}

/// Applies `B_S^+` through padded solves. Inputs are projected onto the range
/// of the original operator first and outputs projected again, which keeps
/// the operator symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct SchurPreconditioner<'a> {
    factor: &'a CholeskyFactor,
    n: usize,
    /// Orthonormal basis of the original operator's null space.
    null_basis: Vec<Vec<f64>>,
}

impl<'a> SchurPreconditioner<'a> {
    pub fn new(factor: &'a CholeskyFactor, n: usize, null_basis: Vec<Vec<f64>>) -> Self {
        Self {
            factor,
            n,
            null_basis,
        }
    }
}

impl LinearOperator for SchurPreconditioner<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut padded = x.to_vec();
        project_out(&mut padded, &self.null_basis);
        padded.resize(self.factor.dim(), 0.0);
        // the padded vector is in range(B) up to rounding; project the residue
        project_range(self.factor, &mut padded);
        let z = self.factor.solve_unchecked(&padded);
        y.copy_from_slice(&z[..self.n]);
        project_out(y, &self.null_basis);
    }
}
