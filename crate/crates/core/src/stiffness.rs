//! Stiffness-matrix assembly, sparse symmetric storage and the rigid-motion
//! null space.

use std::io::Write;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{perp, Vec2};
use crate::truss::Truss;

/// Rank-one contribution `(gamma / len) * u u^T` of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrix {
    pub i: usize,
    pub j: usize,
    pub gamma: f64,
    /// Unit vector at slot `i`; slot `j` carries its negation.
    pub direction: Vec2,
    pub coefficient: f64,
}

impl ElementMatrix {
    /// The 4x4 block over dofs `[2i, 2i+1, 2j, 2j+1]`.
    pub fn block(&self) -> [[f64; 4]; 4] {
        let u = [self.direction.x, self.direction.y, -self.direction.x, -self.direction.y];
        let mut b = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                b[r][c] = self.coefficient * u[r] * u[c];
            }
        }
        b
    }

    pub fn dofs(&self) -> [usize; 4] {
        [2 * self.i, 2 * self.i + 1, 2 * self.j, 2 * self.j + 1]
    }

    /// `u_e^T x`.
    pub fn project(&self, x: &[f64]) -> f64 {
        let d = self.direction;
        d.x * (x[2 * self.i] - x[2 * self.j]) + d.y * (x[2 * self.i + 1] - x[2 * self.j + 1])
    }
}

pub fn element_matrix(truss: &Truss, element: usize) -> Result<ElementMatrix> {
    let e = truss.elements()[element];
    element_matrix_at(truss.position(e.i), truss.position(e.j), e.i, e.j, e.gamma)
}

pub(crate) fn element_matrix_at(pi: Vec2, pj: Vec2, i: usize, j: usize, gamma: f64) -> Result<ElementMatrix> {
    let d = pi - pj;
    let len = d.norm();
    if len < crate::truss::MIN_LENGTH {
        return Err(Error::ZeroLengthElement(i, j));
    }
    Ok(ElementMatrix {
        i,
        j,
        gamma,
        direction: d / len,
        coefficient: gamma / len,
    })
}

/// Symmetric sparse matrix stored as canonical lower-triangle triplets, with a
/// full compressed-row view built on first use.
#[derive(Debug, Clone)]
pub struct SparseSymmetricMatrix {
    dim: usize,
    lower: Vec<(usize, usize, f64)>,
    csr: OnceLock<Csr>,
}

#[derive(Debug, Clone)]
struct Csr {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl PartialEq for SparseSymmetricMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.lower == other.lower
    }
}

impl SparseSymmetricMatrix {
    /// Entries may be given in either triangle; `(r, c)` and `(c, r)` name the
    /// same stored entry and duplicates are summed.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for t in entries.iter_mut() {
            if t.0 >= dim || t.1 >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.0.max(t.1) + 1,
                });
            }
            if t.0 < t.1 {
                *t = (t.1, t.0, t.2);
            }
        }
        entries.sort_unstable_by_key(|t| (t.0, t.1));
        let mut lower: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match lower.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => lower.push((r, c, v)),
            }
        }
        Ok(Self {
            dim,
            lower,
            csr: OnceLock::new(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)).collect()).expect("in range")
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for c in 0..m.ncols() {
            for r in c..m.nrows() {
                if m[(r, c)] != 0.0 {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), t).expect("in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored lower-triangle entries `(row, col, value)` with `row >= col`,
    /// sorted by row then column.
    pub fn lower(&self) -> &[(usize, usize, f64)] {
        &self.lower
    }

    pub fn nnz_lower(&self) -> usize {
        self.lower.len()
    }

    fn csr(&self) -> &Csr {
        self.csr.get_or_init(|| {
            let mut counts = vec![0usize; self.dim + 1];
            for &(r, c, _) in &self.lower {
                counts[r + 1] += 1;
                if r != c {
                    counts[c + 1] += 1;
                }
            }
            for i in 0..self.dim {
                counts[i + 1] += counts[i];
            }
            let total = counts[self.dim];
            let mut next = counts.clone();
            let mut cols = vec![0; total];
            let mut vals = vec![0.0; total];
            let mut put = |r: usize, c: usize, v: f64| {
                cols[next[r]] = c;
                vals[next[r]] = v;
                next[r] += 1;
            };
            for &(r, c, v) in &self.lower {
                put(r, c, v);
                if r != c {
                    put(c, r, v);
                }
            }
            Csr {
                row_ptr: counts,
                cols,
                vals,
            }
        })
    }

    /// Column indices and values of row `r` (both triangles).
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let csr = self.csr();
        let (a, b) = (csr.row_ptr[r], csr.row_ptr[r + 1]);
        (&csr.cols[a..b], &csr.vals[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (r, c) = (r.max(c), r.min(c));
        self.lower
            .binary_search_by_key(&(r, c), |t| (t.0, t.1))
            .map(|k| self.lower[k].2)
            .unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(r, c, v) in &self.lower {
            if r == c {
                d[r] = v;
            }
        }
        d
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.lower {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        let csr = self.csr();
        for (r, out) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in csr.row_ptr[r]..csr.row_ptr[r + 1] {
                s += csr.vals[k] * x[csr.cols[k]];
            }
            *out = s;
        }
        Ok(())
    }

    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        let y = self.matvec(x)?;
        Ok(dot(x, &y))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.lower
            .iter()
            .map(|&(r, c, v)| if r == c { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            lower: self.lower.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
            csr: OnceLock::new(),
        }
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal_dense(&self, idx: &[usize]) -> DMatrix<f64> {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut m = DMatrix::zeros(idx.len(), idx.len());
        for &(r, c, v) in &self.lower {
            let (pr, pc) = (pos[r], pos[c]);
            if pr != usize::MAX && pc != usize::MAX {
                m[(pr, pc)] = v;
                m[(pc, pr)] = v;
            }
        }
        m
    }

    /// Coordinate text dump: header `%<dim/2> <dim> <nnz>` followed by
    /// `i j value` lower-triangle lines.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%{} {} {}", self.dim / 2, self.dim, self.lower.len())?;
        for &(r, c, v) in &self.lower {
            writeln!(w, "{r} {c} {v:e}")?;
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lower-triangle triplets of every element block.
pub(crate) fn element_triplets(m: &ElementMatrix, out: &mut Vec<(usize, usize, f64)>) {
    let block = m.block();
    let dofs = m.dofs();
    for r in 0..4 {
        for c in 0..=r {
            let v = block[r][c];
            if v != 0.0 {
                out.push((dofs[r], dofs[c], v));
            }
        }
    }
}

pub fn assemble(truss: &Truss) -> Result<SparseSymmetricMatrix> {
    let mut t = Vec::with_capacity(10 * truss.elements().len());
    for idx in 0..truss.elements().len() {
        element_triplets(&element_matrix(truss, idx)?, &mut t);
    }
    SparseSymmetricMatrix::from_triplets(truss.dof(), t)
}

/// Stiffness matrix of a subset of elements, still of full dimension.
pub fn assemble_elements(truss: &Truss, elements: &[usize]) -> Result<SparseSymmetricMatrix> {
    let mut t = Vec::with_capacity(10 * elements.len());
    for &idx in elements {
        element_triplets(&element_matrix(truss, idx)?, &mut t);
    }
    SparseSymmetricMatrix::from_triplets(truss.dof(), t)
}

/// Translations in x and y and the infinitesimal rotation about vertex 0.
pub fn rigid_null_basis(truss: &Truss) -> [Vec<f64>; 3] {
    let n = truss.vertex_count();
    let mut tx = vec![0.0; 2 * n];
    let mut ty = vec![0.0; 2 * n];
    let mut rot = vec![0.0; 2 * n];
    let v0 = truss.position(0);
    for i in 0..n {
        tx[2 * i] = 1.0;
        ty[2 * i + 1] = 1.0;
        let r = perp(truss.position(i) - v0);
        rot[2 * i] = r.x;
        rot[2 * i + 1] = r.y;
    }
    [tx, ty, rot]
}

/// Modified Gram-Schmidt; vectors that collapse below `1e-12` of their
/// original norm are discarded.
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        let n0 = norm(&w);
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &out {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n1 = norm(&w);
        if n1 > 1e-12 * n0 {
            w.iter_mut().for_each(|x| *x /= n1);
            out.push(w);
        }
    }
    out
}

/// Removes the components of `x` along an orthonormal basis.
pub fn project_out(x: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(x, q);
        for (xi, qi) in x.iter_mut().zip(q) {
            *xi -= c * qi;
        }
    }
}
