//! How well a truss path supports one element between its end vertices, as
//! a function of the number of faces.

use serde::Serialize;

use super::pencil::pencil_eigs_dense;
use crate::error::{Error, Result};
use crate::generate::gen_path_jittered;
use crate::stiffness::{assemble, element_matrix_at, element_triplets, SparseSymmetricMatrix};
use crate::truss::{quality_bounds, TrussQualityBounds};

#[derive(Debug, Clone, Serialize)]
pub struct PathLemmaRow {
    pub k: usize,
    pub lambda_max: f64,
    /// `lambda_max` over that of the previous row.
    pub ratio: Option<f64>,
    pub quality: TrussQualityBounds,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathLemmaTable {
    pub rows: Vec<PathLemmaRow>,
    /// Least-squares slope of `ln lambda_max` against `ln k`.
    pub slope: f64,
}

impl PathLemmaTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lambda_max,ratio\n");
        for r in &self.rows {
            let ratio = r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default();
            out.push_str(&format!("{},{:.10e},{}\n", r.k, r.lambda_max, ratio));
        }
        out
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// `lambda_max(A_e0, A_path)` where `e0` joins the first and last vertex of
/// a `k`-face truss path with unit weight.
pub fn path_support(k: usize, jitter: f64, seed: u64) -> Result<(f64, TrussQualityBounds)> {
    let path = gen_path_jittered(k, jitter, seed)?;
    let (p, q) = (0, k + 1);
    let e0 = element_matrix_at(path.position(p), path.position(q), p, q, 1.0)?;
    let mut trip = Vec::new();
    element_triplets(&e0, &mut trip);
    let a = SparseSymmetricMatrix::from_triplets(path.dof(), trip)?;
    let b = assemble(&path)?;
    let spec = pencil_eigs_dense(&a.to_dense(), &b.to_dense())?;
    Ok((spec.lambda_max, quality_bounds(&path)))
}

/// Runs [`path_support`] for every length and fits the log-log slope.
pub fn path_lemma_experiment(lengths: &[usize], jitter: f64, seed: u64) -> Result<PathLemmaTable> {
    let mut rows: Vec<PathLemmaRow> = Vec::with_capacity(lengths.len());
    for &k in lengths {
        if k < 2 {
            return Err(Error::InvalidTruss(format!("path length {k} is below 2")));
        }
        let (lambda_max, quality) = path_support(k, jitter, seed)?;
        let ratio = rows.last().map(|r| lambda_max / r.lambda_max);
        rows.push(PathLemmaRow {
            k,
            lambda_max,
            ratio,
            quality,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.k as f64).ln(), r.lambda_max.ln()))
        .collect();
    let slope = if pts.len() < 2 {
        0.0
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    };
    Ok(PathLemmaTable { rows, slope })
}
