//! Verification suites run against a single truss, reported as JSON.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{fretsaw_certificate, null_space_dim, pencil_eigs_dense, schur_complement_dense, DENSE_LIMIT};
use crate::embedding::{check_decomposition, RootedTree};
use crate::error::{Error, Result};
use crate::fretsaw::FretsawExtension;
use crate::pipeline::{build_preconditioner, element_embedding, Preconditioner};
use crate::stiffness::{norm, rigid_null_basis};
use crate::truss::{is_stiffly_connected, quality_bounds, Truss};

/// Random probes per inequality check.
pub const PROBES: usize = 200;
/// Random right-hand sides for the Schur solve check.
pub const SCHUR_PROBES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Nullspace,
    Fretsaw,
    Bounds,
    Embedding,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Nullspace, Suite::Fretsaw, Suite::Bounds, Suite::Embedding];

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse(name: &str) -> Option<Vec<Suite>> {
        Some(match name {
            "all" => Self::ALL.to_vec(),
            "nullspace" => vec![Suite::Nullspace],
            "fretsaw" => vec![Suite::Fretsaw],
            "bounds" => vec![Suite::Bounds],
            "embedding" => vec![Suite::Embedding],
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Nullspace => "nullspace",
            Suite::Fretsaw => "fretsaw",
            Suite::Bounds => "bounds",
            Suite::Embedding => "embedding",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Set when the check was not run, for instance because the instance is
    /// too large for the dense oracle.
    pub skipped: bool,
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    fn le(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= limit,
            skipped: false,
            value: Some(value),
            limit: Some(limit),
            detail: None,
        }
    }

    fn ge(name: &str, value: f64, limit: f64) -> Self {
        Self {
            passed: value >= limit,
            ..Self::le(name, value, limit)
        }
    }

    fn flag(name: &str, passed: bool, detail: Option<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            skipped: false,
            value: None,
            limit: None,
            detail,
        }
    }

    fn skipped(name: &str, why: &str) -> Self {
        Self {
            skipped: true,
            ..Self::flag(name, true, Some(why.into()))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        Self {
            suite,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub vertices: usize,
    pub elements: usize,
    pub faces: usize,
    pub stiffly_connected: bool,
    /// Set when a suite could not run at all.
    pub error: Option<String>,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the selected suites. Failures of individual checks, and a truss that
/// is not stiffly connected, are reported rather than returned as errors.
pub fn verify(truss: &Truss, suites: &[Suite], k: Option<usize>, seed: u64) -> VerifyReport {
    let (stiff, witness) = is_stiffly_connected(truss);
    let mut report = VerifyReport {
        vertices: truss.vertex_count(),
        elements: truss.elements().len(),
        faces: truss.faces().len(),
        stiffly_connected: stiff,
        error: None,
        suites: Vec::new(),
        passed: false,
    };
    if let Some(w) = witness {
        report.error = Some(Error::NotStifflyConnected(w).to_string());
        return report;
    }
    let pre = match build_preconditioner(truss, k) {
        Ok(p) => p,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let mut dense = None;
    for &suite in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let checks = match suite {
            Suite::Nullspace => nullspace_checks(truss, &pre, &mut dense),
            Suite::Fretsaw => fretsaw_checks(truss, &pre, &mut dense, &mut rng),
            Suite::Bounds => bounds_checks(truss, &pre, &mut dense),
            Suite::Embedding => embedding_checks(truss, &pre),
        };
        match checks {
            Ok(c) => report.suites.push(SuiteReport::new(suite, c)),
            Err(e) => report.suites.push(SuiteReport::new(
                suite,
                vec![Check::flag("suite ran", false, Some(e.to_string()))],
            )),
        }
    }
    report.passed = report.suites.iter().all(|s| s.passed);
    report
}

/// Dense `A`, `B`, `B_S` and the padded `A'`, built once per run.
pub struct DenseSystem {
    pub a: DMatrix<f64>,
    pub a_pad: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub schur: DMatrix<f64>,
}

impl DenseSystem {
    pub fn new(pre: &Preconditioner) -> Result<Self> {
        let n2 = pre.a.dim();
        let m2 = pre.b.dim();
        if m2 > DENSE_LIMIT {
            return Err(Error::TooLargeForDense(m2));
        }
        let a = pre.a.to_dense();
        let b = pre.b.to_dense();
        let mut a_pad = DMatrix::zeros(m2, m2);
        a_pad.view_mut((0, 0), (n2, n2)).copy_from(&a);
        let schur = schur_complement_dense(&b, n2)?;
        Ok(Self { a, a_pad, b, schur })
    }
}

fn dense_system<'a>(pre: &Preconditioner, slot: &'a mut Option<Option<DenseSystem>>) -> Option<&'a DenseSystem> {
    slot.get_or_insert_with(|| DenseSystem::new(pre).ok()).as_ref()
}

const TOO_LARGE: &str = "instance too large for the dense oracle";

fn nullspace_checks(
    truss: &Truss,
    pre: &Preconditioner,
    dense: &mut Option<Option<DenseSystem>>,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let scale = pre.a.frobenius_norm();
    for (name, v) in ["translation x", "translation y", "rotation"].iter().zip(rigid_null_basis(truss)) {
        let r = norm(&pre.a.matvec(&v)?) / (scale * norm(&v));
        checks.push(Check::le(&format!("A * {name} residual"), r, 1e-10));
    }
    checks.push(Check::le(
        "factor null dimension",
        pre.factor.null_basis().len() as f64,
        3.0,
    ));
    match dense_system(pre, dense) {
        Some(d) => {
            let na = null_space_dim(&d.a);
            let ns = null_space_dim(&d.schur);
            checks.push(Check {
                passed: na == 3,
                ..Check::le("dim null(A)", na as f64, 3.0)
            });
            checks.push(Check {
                passed: ns == 3,
                ..Check::le("dim null(B_S)", ns as f64, 3.0)
            });
        }
        None => checks.push(Check::skipped("dim null(A), dim null(B_S)", TOO_LARGE)),
    }
    Ok(checks)
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Worst violation of `A <= M B M' <= 2A` over random probes, relative to
/// `x'Ax`.
pub fn sandwich_violation(
    a: &crate::stiffness::SparseSymmetricMatrix,
    b: &crate::stiffness::SparseSymmetricMatrix,
    ext: &FretsawExtension,
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x = random_vec(rng, a.dim());
        let xa = a.quad_form(&x)?;
        let xb = b.quad_form(&ext.lift(&x))?;
        let scale = xa.abs().max(f64::MIN_POSITIVE);
        worst = worst.max((xa - xb) / scale).max((xb - 2.0 * xa) / scale);
    }
    Ok(worst)
}

fn fretsaw_checks(
    truss: &Truss,
    pre: &Preconditioner,
    dense: &mut Option<Option<DenseSystem>>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>> {
    let s = &pre.structure;
    let mut checks = vec![
        Check::flag("H' within Q'", s.h_subset_of_q, None),
        Check::le("|Q' - H'| <= k(H)", s.extra_edges as f64, s.k as f64),
        Check::flag("extension stiffly connected", s.stiffly_connected, None),
        Check::flag(
            "face count preserved",
            pre.extension.extended.faces().len() == truss.faces().len(),
            None,
        ),
        Check::le(
            "A <= MBM' <= 2A violation",
            sandwich_violation(&pre.a, &pre.b, &pre.extension, PROBES, rng)?,
            1e-10,
        ),
    ];
    let stats = pre.factor.stats();
    checks.push(Check {
        passed: stats.dropped_pivots == 3,
        ..Check::le("dropped pivots", stats.dropped_pivots as f64, 3.0)
    });
    let s_prime = crate::factor::extra_rigidity_edges(&pre.extension.extended);
    checks.push(Check::le(
        "core vertices <= 8 |S'|",
        pre.trim.core_size() as f64,
        (8 * s_prime) as f64,
    ));
    match dense_system(pre, dense) {
        Some(d) => {
            let n2 = pre.a.dim();
            let mut worst: f64 = 0.0;
            for _ in 0..SCHUR_PROBES {
                let mut b = random_vec(rng, n2);
                crate::stiffness::project_out(&mut b, &pre.null_basis);
                let x = pre.factor.solve_schur(&b)?;
                let r = &d.schur * DVector::from_column_slice(&x) - DVector::from_column_slice(&b);
                worst = worst.max(r.norm() / norm(&b));
            }
            checks.push(Check::le("Schur solve residual", worst, 1e-8));
        }
        None => checks.push(Check::skipped("Schur solve residual", TOO_LARGE)),
    }
    Ok(checks)
}

fn bounds_checks(
    truss: &Truss,
    pre: &Preconditioner,
    dense: &mut Option<Option<DenseSystem>>,
) -> Result<Vec<Check>> {
    let Some(d) = dense_system(pre, dense) else {
        return Ok(vec![Check::skipped("pencil bounds", TOO_LARGE)]);
    };
    let as_ = pencil_eigs_dense(&d.a, &d.schur)?;
    let apb = pencil_eigs_dense(&d.a_pad, &d.b)?;
    let cert = fretsaw_certificate(truss, &pre.extension, &pre.tau)?;
    let rel = (apb.lambda_max - as_.lambda_max).abs() / apb.lambda_max;
    Ok(vec![
        Check::ge("lambda_min(A, B_S)", as_.lambda_min, 0.5 - 1e-9),
        Check::le("kappa(A, B_S)", as_.kappa, 2.0 * apb.lambda_max * (1.0 + 1e-6)),
        Check::le("|lambda_max(A', B) - lambda_max(A, B_S)| rel", rel, 1e-6),
        Check::ge(
            "congestion-dilation bound",
            cert.bound,
            apb.lambda_max * (1.0 - 1e-6),
        ),
    ])
}

fn embedding_checks(truss: &Truss, pre: &Preconditioner) -> Result<Vec<Check>> {
    let g = &pre.rigidity.graph;
    let aug = &pre.augment;
    let tree = RootedTree::new(g, &pre.tree, 0)?;
    let mut checks = vec![Check::le("|S| <= k", aug.extra_edges.len() as f64, pre.k as f64)];
    let lhs = (aug.k as u128) * (aug.congestion_pi as u128);
    let rhs = 24 * (aug.stretch as u128) * (aug.congestion_psi as u128);
    checks.push(Check {
        detail: Some(format!("k*cong(pi) = {lhs}, 24*str*cong(psi) = {rhs}")),
        ..Check::le("k cong(pi) <= 24 str(T) cong(psi)", lhs as f64, rhs as f64)
    });
    let worst_dilation = aug
        .edge_paths
        .iter()
        .enumerate()
        .map(|(e, p)| {
            let (v, w) = g.edge(e);
            p.len() as f64 / tree.distance(v, w) as f64
        })
        .fold(0.0, f64::max);
    checks.push(Check::le("|pi(v,w)| / |T(v,w)|", worst_dilation, 3.0));
    if aug.k_decompose > 0 {
        let ok = check_decomposition(g, &tree, &aug.eta, aug.k_decompose, &aug.decomposition);
        checks.push(Check::flag("tree decomposition", ok.is_ok(), ok.err().map(|e| e.to_string())));
    }
    let q = quality_bounds(truss);
    let max_faces = (0..truss.vertex_count()).map(|v| truss.faces_of(v).len()).max().unwrap_or(0);
    checks.push(Check::le("max |F_i|", max_faces as f64, 2.0 * PI / q.theta_min));
    let (_, psi) = element_embedding(truss, &pre.rigidity, &pre.tau)?;
    let worst_psi = truss
        .elements()
        .iter()
        .zip(&psi)
        .map(|(e, p)| p.len() as f64 - (truss.faces_of(e.i).len() + truss.faces_of(e.j).len()) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::le("|psi(z)| - |F_i| - |F_j|", worst_psi, 0.0));
    checks.push(Check {
        detail: Some(format!("stretch {}", aug.stretch)),
        ..Check::flag("tree spans rigidity graph", pre.tree.len() + 1 == g.node_count(), None)
    });
    Ok(checks)
}
