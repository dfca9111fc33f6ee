//! End-to-end solver: choose a rigidity subgraph, build its fretsaw
//! extension, factor it and run PCG with the Schur complement as
//! preconditioner.

use serde::Serialize;

use crate::embedding::{low_congest_augment, spanning_tree_low_stretch, AugmentResult};
use crate::error::{Error, Result};
use crate::factor::{factorize_truss, CholeskyFactor, FactorStats, SchurPreconditioner, TrimOrder};
use crate::fretsaw::{default_tau, fretsaw_with, structure_report, FretsawExtension, StructureReport};
use crate::graph::EdgeId;
use crate::pcg::{pcg_solve, Identity, SolveReport};
use crate::stiffness::{assemble, norm, orthonormalize, project_out, rigid_null_basis, SparseSymmetricMatrix};
use crate::truss::{is_stiffly_connected, rigidity_graph, RigidityGraph, Truss};

/// Relative size of a rigid-motion component in the load above which a
/// warning is logged before it is projected out.
pub const RHS_NULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub eps: f64,
    /// Budget for extra rigidity edges; `default_k` when absent.
    pub k_override: Option<usize>,
    pub seed: u64,
    pub max_iter: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            k_override: None,
            seed: 0,
            max_iter: None,
        }
    }
}

impl PipelineConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidTruss(format!("eps must be positive, got {}", self.eps)));
        }
        if self.k_override == Some(0) {
            return Err(Error::InvalidTruss("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// `round(n^(5/6) * sqrt(ln(n)^2 * max(1, ln ln n)))`, at least 1.
pub fn default_k(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    let n = n as f64;
    let ln = n.ln();
    let lnln = ln.ln().max(1.0);
    let k = (n.powf(5.0 / 6.0) * (ln * ln * lnln).sqrt()).round();
    (k as usize).max(1)
}

/// `k` clamped to `[1, max(1, n_f - 1)]`.
pub fn clamp_k(k: usize, face_count: usize) -> usize {
    k.clamp(1, face_count.saturating_sub(1).max(1))
}

/// `psi` pairs and paths: for every element `(i, j)`, a shortest rigidity
/// path from `tau(i)` to `tau(j)` through faces around `i` or `j`.
pub fn element_embedding(
    truss: &Truss,
    q: &RigidityGraph,
    tau: &[usize],
) -> Result<(Vec<(usize, usize)>, Vec<Vec<EdgeId>>)> {
    let mut allowed = vec![false; q.node_count()];
    let mut pairs = Vec::with_capacity(truss.elements().len());
    let mut paths = Vec::with_capacity(truss.elements().len());
    for e in truss.elements() {
        let local: Vec<usize> = truss.faces_of(e.i).iter().chain(truss.faces_of(e.j)).copied().collect();
        for &f in &local {
            allowed[f] = true;
        }
        let path = q
            .graph
            .shortest_path_within(tau[e.i], tau[e.j], &allowed)
            .ok_or_else(|| {
                Error::InvariantViolated(format!(
                    "faces around element ({}, {}) are not connected",
                    e.i, e.j
                ))
            })?;
        for &f in &local {
            allowed[f] = false;
        }
        pairs.push((tau[e.i], tau[e.j]));
        paths.push(path);
    }
    Ok((pairs, paths))
}

/// Everything built from the truss before iterating.
#[derive(Debug, Clone)]
pub struct Preconditioner {
    pub a: SparseSymmetricMatrix,
    /// Orthonormal rigid-motion basis of the original truss.
    pub null_basis: Vec<Vec<f64>>,
    pub tau: Vec<usize>,
    pub rigidity: RigidityGraph,
    pub tree: Vec<EdgeId>,
    pub augment: AugmentResult,
    /// `tree ∪ S`, ascending.
    pub subgraph: Vec<EdgeId>,
    pub k: usize,
    pub extension: FretsawExtension,
    pub structure: StructureReport,
    pub b: SparseSymmetricMatrix,
    pub trim: TrimOrder,
    pub factor: CholeskyFactor,
}

impl Preconditioner {
    pub fn operator(&self) -> SchurPreconditioner<'_> {
        SchurPreconditioner::new(&self.factor, self.a.dim(), self.null_basis.clone())
    }

    pub fn info(&self) -> PipelineInfo {
        PipelineInfo {
            n: self.a.dim() / 2,
            m: self.extension.vertex_count(),
            faces: self.rigidity.node_count(),
            k: self.k,
            extra_edges: self.augment.extra_edges.len(),
            stretch: self.augment.stretch,
            congestion_psi: self.augment.congestion_psi,
            congestion_pi: self.augment.congestion_pi,
            embedding_certified: self.augment.certified,
            core_vertices: self.trim.core_size(),
            factor: self.factor.stats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineInfo {
    pub n: usize,
    /// Vertices of the extension.
    pub m: usize,
    pub faces: usize,
    pub k: usize,
    /// `|S|`.
    pub extra_edges: usize,
    pub stretch: u64,
    pub congestion_psi: u64,
    pub congestion_pi: u64,
    pub embedding_certified: bool,
    pub core_vertices: usize,
    pub factor: FactorStats,
}

/// Builds and factors the fretsaw preconditioner with edge budget `k`
/// (`default_k` of the vertex count when `None`).
pub fn build_preconditioner(truss: &Truss, k: Option<usize>) -> Result<Preconditioner> {
    if let (false, Some(w)) = is_stiffly_connected(truss) {
        return Err(Error::NotStifflyConnected(w));
    }
    let a = assemble(truss)?;
    let null_basis = orthonormalize(&rigid_null_basis(truss));
    let tau = default_tau(truss)?;
    let rigidity = rigidity_graph(truss);
    let k = clamp_k(k.unwrap_or_else(|| default_k(truss.vertex_count())), rigidity.node_count());
    let tree = spanning_tree_low_stretch(&rigidity.graph)?;
    let (pairs, psi) = element_embedding(truss, &rigidity, &tau)?;
    let augment = low_congest_augment(&rigidity.graph, &tree, &pairs, &psi, k as u64)?;
    let mut subgraph: Vec<EdgeId> = tree.iter().chain(&augment.extra_edges).copied().collect();
    subgraph.sort_unstable();
    subgraph.dedup();
    let extension = fretsaw_with(truss, &rigidity, &subgraph, &tau)?;
    let structure = structure_report(truss, &rigidity, &extension, &subgraph);
    let (b, trim, factor) = factorize_truss(&extension.extended)?;
    log::info!(
        "n={} m={} k={} |S|={} core={} fill={}",
        truss.vertex_count(),
        extension.vertex_count(),
        k,
        augment.extra_edges.len(),
        trim.core_size(),
        factor.stats().fill_nnz
    );
    Ok(Preconditioner {
        a,
        null_basis,
        tau,
        rigidity,
        tree,
        augment,
        subgraph,
        k,
        extension,
        structure,
        b,
        trim,
        factor,
    })
}

/// Projects rigid motions out of a load, warning when they are not tiny.
pub fn project_load(b: &[f64], null_basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = b.to_vec();
    project_out(&mut out, null_basis);
    let total = norm(b);
    let removed = (total * total - norm(&out).powi(2)).max(0.0).sqrt();
    if total > 0.0 && removed > RHS_NULL_TOL * total {
        log::warn!(
            "load has a rigid-motion component of relative size {:.3e}; projected out",
            removed / total
        );
    }
    out
}

fn check_rhs(truss: &Truss, b: &[f64]) -> Result<()> {
    if b.len() != truss.dof() {
        return Err(Error::DimensionMismatch {
            expected: truss.dof(),
            got: b.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub report: SolveReport,
    /// Absent when the projected load is zero and nothing was built.
    pub info: Option<PipelineInfo>,
}

/// Solves `A x = b` to relative A-norm error `config.eps`.
pub fn truss_solve(truss: &Truss, b: &[f64], config: &PipelineConfig) -> Result<(Vec<f64>, SolveReport)> {
    truss_solve_detailed(truss, b, config).map(|o| (o.x, o.report))
}

pub fn truss_solve_detailed(truss: &Truss, b: &[f64], config: &PipelineConfig) -> Result<SolveOutcome> {
    config.validate()?;
    check_rhs(truss, b)?;
    if let (false, Some(w)) = is_stiffly_connected(truss) {
        return Err(Error::NotStifflyConnected(w));
    }
    let null_basis = orthonormalize(&rigid_null_basis(truss));
    let rhs = project_load(b, &null_basis);
    if rhs.iter().all(|&v| v == 0.0) {
        let (x, report) = pcg_solve(&Identity(rhs.len()), &Identity(rhs.len()), &rhs, config.eps, None, &[])?;
        return Ok(SolveOutcome { x, report, info: None });
    }
    let pre = build_preconditioner(truss, config.k_override)?;
    solve_with(&pre, &rhs, config)
}

/// PCG on a prebuilt preconditioner.
pub fn solve_with(pre: &Preconditioner, b: &[f64], config: &PipelineConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let op = pre.operator();
    let (x, report) = pcg_solve(&pre.a, &op, b, config.eps, config.max_iter, &pre.null_basis)?;
    Ok(SolveOutcome {
        x,
        report,
        info: Some(pre.info()),
    })
}

/// Unpreconditioned CG with the same stopping rule, for comparison.
pub fn cg_solve(truss: &Truss, b: &[f64], config: &PipelineConfig) -> Result<(Vec<f64>, SolveReport)> {
    config.validate()?;
    check_rhs(truss, b)?;
    let a = assemble(truss)?;
    let null_basis = orthonormalize(&rigid_null_basis(truss));
    let rhs = project_load(b, &null_basis);
    pcg_solve(&a, &Identity(a.dim()), &rhs, config.eps, config.max_iter, &null_basis)
}
