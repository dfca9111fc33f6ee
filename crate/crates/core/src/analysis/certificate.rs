//! Congestion-dilation certificates: bound `lambda_max(A, B)` by supporting
//! each term of `A` with a subset of the terms of `B`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::pencil::{pencil_eigs_dense, symmetric_eigen, DENSE_LIMIT, NULL_THRESHOLD};
use crate::error::{Error, Result};
use crate::fretsaw::FretsawExtension;
use crate::stiffness::{element_matrix, element_matrix_at, element_triplets, SparseSymmetricMatrix};
use crate::truss::{rigidity_graph, Truss};

#[derive(Debug, Clone, Serialize)]
pub struct CertificateTerm {
    /// Original element supported by this term.
    pub element: usize,
    /// Extended faces of the supporting truss path.
    pub faces: Vec<usize>,
    /// Extended elements in those faces.
    pub support: Vec<usize>,
    pub s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongestionCertificate {
    pub terms: Vec<CertificateTerm>,
    /// `sum of s_i over terms supported by B_j`, per extended element `j`.
    pub congestion: Vec<f64>,
    pub bound: f64,
    /// `lambda_max(A', B)` from the dense oracle, when small enough.
    pub measured_lambda_max: Option<f64>,
}

impl CongestionCertificate {
    /// The bound dominates the measured eigenvalue up to `rel` relative slack.
    pub fn holds(&self, rel: f64) -> Option<bool> {
        self.measured_lambda_max.map(|m| m <= self.bound * (1.0 + rel))
    }
}

/// Dense principal submatrix over `dofs` of a sum of sparse terms.
fn restricted_sum<'a>(
    terms: impl IntoIterator<Item = &'a SparseSymmetricMatrix>,
    index: &BTreeMap<usize, usize>,
) -> DMatrix<f64> {
    let d = index.len();
    let mut m = DMatrix::zeros(d, d);
    for t in terms {
        for &(r, c, v) in t.lower() {
            let (r, c) = (index[&r], index[&c]);
            m[(r, c)] += v;
            if r != c {
                m[(c, r)] += v;
            }
        }
    }
    m
}

/// `lambda_max(a, b)`, or infinity when `a` has weight on `null(b)`.
fn support_number(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let (values, vectors) = symmetric_eigen(b);
    let top = values.max();
    let scale = a.trace().abs().max(f64::MIN_POSITIVE);
    for k in 0..b.nrows() {
        if values[k] <= NULL_THRESHOLD * top {
            let z = vectors.column(k);
            if (z.transpose() * a * z)[(0, 0)] > NULL_THRESHOLD * scale {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(pencil_eigs_dense(a, b)?.lambda_max)
}

/// For `A = sum A_i`, `B = sum B_j` and supports `Sigma_i`, returns the
/// support numbers `s_i = lambda_max(A_i, sum_{j in Sigma_i} B_j)`, the
/// congestion of every `B_j` and `max_j sum_{i: j in Sigma_i} s_i`.
pub fn congestion_dilation_bound(
    a_terms: &[SparseSymmetricMatrix],
    b_terms: &[SparseSymmetricMatrix],
    supports: &[Vec<usize>],
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if supports.len() != a_terms.len() {
        return Err(Error::DimensionMismatch {
            expected: a_terms.len(),
            got: supports.len(),
        });
    }
    let mut s = Vec::with_capacity(a_terms.len());
    let mut congestion = vec![0.0; b_terms.len()];
    for (a, sigma) in a_terms.iter().zip(supports) {
        let mut index = BTreeMap::new();
        for &j in sigma {
            let b = b_terms.get(j).ok_or_else(|| {
                Error::InvariantViolated(format!("support index {j} out of range"))
            })?;
            if b.dim() != a.dim() {
                return Err(Error::DimensionMismatch {
                    expected: a.dim(),
                    got: b.dim(),
                });
            }
        }
        for t in std::iter::once(a).chain(sigma.iter().map(|&j| &b_terms[j])) {
            for &(r, c, _) in t.lower() {
                index.entry(r).or_insert(0);
                index.entry(c).or_insert(0);
            }
        }
        for (k, slot) in index.values_mut().enumerate() {
            *slot = k;
        }
        if index.len() > DENSE_LIMIT {
            return Err(Error::TooLargeForDense(index.len()));
        }
        let ad = restricted_sum([a], &index);
        let bd = restricted_sum(sigma.iter().map(|&j| &b_terms[j]), &index);
        let si = support_number(&ad, &bd)?;
        for &j in sigma {
            congestion[j] += si;
        }
        s.push(si);
    }
    let bound = congestion.iter().cloned().fold(0.0, f64::max);
    Ok((s, congestion, bound))
}

/// Certificate for `lambda_max(A', B)` where `A'` is the padded stiffness
/// matrix of `truss` and `B` that of the extension. Each original element
/// `(p, q)` is supported by the faces of a shortest rigidity path of the
/// extension between the faces holding the original copies of `p` and `q`.
pub fn fretsaw_certificate(
    truss: &Truss,
    ext: &FretsawExtension,
    tau: &[usize],
) -> Result<CongestionCertificate> {
    let t2 = &ext.extended;
    let dim = t2.dof();
    let q2 = rigidity_graph(t2);
    let all = vec![true; q2.node_count()];

    let b_terms: Vec<SparseSymmetricMatrix> = (0..t2.elements().len())
        .map(|j| {
            let mut trip = Vec::with_capacity(10);
            element_triplets(&element_matrix(t2, j)?, &mut trip);
            SparseSymmetricMatrix::from_triplets(dim, trip)
        })
        .collect::<Result<_>>()?;

    let mut a_terms = Vec::with_capacity(truss.elements().len());
    let mut supports = Vec::with_capacity(truss.elements().len());
    let mut face_paths = Vec::with_capacity(truss.elements().len());
    for e in truss.elements() {
        let m = element_matrix_at(truss.position(e.i), truss.position(e.j), e.i, e.j, e.gamma)?;
        let mut trip = Vec::with_capacity(10);
        element_triplets(&m, &mut trip);
        a_terms.push(SparseSymmetricMatrix::from_triplets(dim, trip)?);

        let (f0, f1) = (ext.rho_inverse(tau[e.i]), ext.rho_inverse(tau[e.j]));
        let path = q2
            .graph
            .shortest_path_within(f0, f1, &all)
            .ok_or(Error::Disconnected)?;
        let faces = q2.graph.walk_vertices(f0, &path)?;
        let mut support: Vec<usize> = faces
            .iter()
            .flat_map(|&f| {
                let [a, b, c] = t2.faces()[f];
                [(a, b), (a, c), (b, c)]
            })
            .map(|(u, v)| {
                t2.element_between(u, v).ok_or_else(|| {
                    Error::InvariantViolated(format!("face edge ({u}, {v}) has no element"))
                })
            })
            .collect::<Result<_>>()?;
        support.sort_unstable();
        support.dedup();
        supports.push(support);
        face_paths.push(faces);
    }

    let (s, congestion, bound) = congestion_dilation_bound(&a_terms, &b_terms, &supports)?;
    let measured_lambda_max = if dim <= DENSE_LIMIT {
        let mut a_pad = Vec::new();
        for t in &a_terms {
            a_pad.extend_from_slice(t.lower());
        }
        let a_pad = SparseSymmetricMatrix::from_triplets(dim, a_pad)?;
        let b = crate::stiffness::assemble(t2)?;
        Some(pencil_eigs_dense(&a_pad.to_dense(), &b.to_dense())?.lambda_max)
    } else {
        None
    };
    let terms = face_paths
        .into_iter()
        .zip(supports)
        .zip(s)
        .enumerate()
        .map(|(element, ((faces, support), s))| CertificateTerm {
            element,
            faces,
            support,
            s,
        })
        .collect();
    Ok(CongestionCertificate {
        terms,
        congestion,
        bound,
        measured_lambda_max,
    })
}
