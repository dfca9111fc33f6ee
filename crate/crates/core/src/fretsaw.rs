//! Fretsaw extensions: split every vertex into one co-located copy per
//! connected piece of the chosen rigidity subgraph around it.

use rustworkx_core::petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::truss::{rigidity_graph, stiffness_witness, Element, RigidityGraph, Truss};

#[derive(Debug, Clone)]
pub struct FretsawExtension {
    pub extended: Truss,
    /// Extended face -> original face. Faces keep their indices, so this is
    /// the identity, but it is stored explicitly for the sidecar format.
    pub rho: Vec<usize>,
    /// Extended vertex -> original vertex; `pi[i] == i` for `i < n`.
    pub pi: Vec<usize>,
    /// Extended element -> original element.
    pub element_map: Vec<usize>,
    /// For each original vertex, `(face, copy)` for every face containing it,
    /// ascending by face.
    copy_of: Vec<Vec<(usize, usize)>>,
    /// Number of original vertices.
    n: usize,
}

impl FretsawExtension {
    pub fn original_vertex_count(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.pi.len()
    }

    /// The copy of original vertex `i` that lies in face `f`.
    pub fn copy_in_face(&self, i: usize, f: usize) -> Option<usize> {
        let list = &self.copy_of[i];
        list.binary_search_by_key(&f, |&(g, _)| g)
            .ok()
            .map(|k| list[k].1)
    }

    /// Distinct copies of original vertex `i`, original first.
    pub fn copies(&self, i: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.copy_of[i].iter().map(|&(_, v)| v).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// `M^T x`: every copy receives the displacement of its original.
    pub fn lift(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.pi.len()];
        for (c, &p) in self.pi.iter().enumerate() {
            out[2 * c] = x[2 * p];
            out[2 * c + 1] = x[2 * p + 1];
        }
        out
    }

    /// `M y`: sums the entries of all copies of each original vertex.
    pub fn collapse(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.n];
        for (c, &p) in self.pi.iter().enumerate() {
            out[2 * p] += y[2 * c];
            out[2 * p + 1] += y[2 * c + 1];
        }
        out
    }

    /// Zero-padding of a length-`2n` vector to length `2m`.
    pub fn pad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        out.resize(2 * self.pi.len(), 0.0);
        out
    }
}

/// Lowest-index face containing each vertex.
pub fn default_tau(truss: &Truss) -> Result<Vec<usize>> {
    (0..truss.vertex_count())
        .map(|v| {
            truss
                .faces_of(v)
                .first()
                .copied()
                .ok_or(Error::VertexInNoFace(v))
        })
        .collect()
}

/// Checks that `h` names distinct rigidity edges forming a connected spanning
/// subgraph.
pub fn check_subgraph(q: &RigidityGraph, h: &[EdgeId]) -> Result<()> {
    let mut seen = vec![false; q.edge_count()];
    for &e in h {
        if e >= q.edge_count() {
            return Err(Error::NotSpanning(format!("edge {e} is not a rigidity edge")));
        }
        if std::mem::replace(&mut seen[e], true) {
            return Err(Error::NotSpanning(format!("edge {e} listed twice")));
        }
    }
    if !q.graph.subgraph_is_connected(h) {
        return Err(Error::NotConnected);
    }
    Ok(())
}

/// Builds the fretsaw extension of `truss` for the rigidity subgraph `h`
/// (edge ids of the truss's rigidity graph) and anchor map `tau`.
pub fn fretsaw(truss: &Truss, h: &[EdgeId], tau: &[usize]) -> Result<FretsawExtension> {
    let q = rigidity_graph(truss);
    fretsaw_with(truss, &q, h, tau)
}

pub fn fretsaw_with(
    truss: &Truss,
    q: &RigidityGraph,
    h: &[EdgeId],
    tau: &[usize],
) -> Result<FretsawExtension> {
    if let Some(w) = stiffness_witness(truss, q) {
        return Err(Error::NotStifflyConnected(w));
    }
    check_subgraph(q, h)?;
    let n = truss.vertex_count();
    if tau.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: tau.len(),
        });
    }
    for (v, &f) in tau.iter().enumerate() {
        if f >= truss.faces().len() || !truss.faces()[f].contains(&v) {
            return Err(Error::InvalidTruss(format!("tau maps vertex {v} to face {f} not containing it")));
        }
    }

    // per-vertex union-find over the faces around it
    let mut uf: Vec<UnionFind<usize>> = (0..n)
        .map(|v| UnionFind::new(truss.faces_of(v).len()))
        .collect();
    let local = |v: usize, f: usize| -> usize {
        truss.faces_of(v).binary_search(&f).expect("face contains vertex")
    };
    for &e in h {
        let (f, g) = q.graph.edge(e);
        let el = truss.elements()[q.shared_element[e]];
        for v in [el.i, el.j] {
            uf[v].union(local(v, f), local(v, g));
        }
    }

    let mut pi: Vec<usize> = (0..n).collect();
    let mut copy_of: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    for v in 0..n {
        let fv = truss.faces_of(v);
        let tau_root = uf[v].find(local(v, tau[v]));
        // component root -> copy, in discovery order over ascending faces
        let mut assigned: Vec<(usize, usize)> = Vec::new();
        let mut list = Vec::with_capacity(fv.len());
        for (slot, &f) in fv.iter().enumerate() {
            let root = uf[v].find(slot);
            let copy = match assigned.iter().find(|&&(r, _)| r == root) {
                Some(&(_, c)) => c,
                None => {
                    let c = if root == tau_root {
                        v
                    } else {
                        pi.push(v);
                        pi.len() - 1
                    };
                    assigned.push((root, c));
                    c
                }
            };
            list.push((f, copy));
        }
        copy_of.push(list);
    }

    let copy = |v: usize, f: usize| -> usize {
        let list = &copy_of[v];
        list[list.binary_search_by_key(&f, |&(g, _)| g).expect("face contains vertex")].1
    };

    let faces: Vec<[usize; 3]> = truss
        .faces()
        .iter()
        .enumerate()
        .map(|(f, tri)| tri.map(|v| copy(v, f)))
        .collect();

    let mut elements = Vec::new();
    let mut element_map = Vec::new();
    for (idx, e) in truss.elements().iter().enumerate() {
        let (fa, fb) = (truss.faces_of(e.i), truss.faces_of(e.j));
        let mut pairs: Vec<(usize, usize)> = fa
            .iter()
            .filter(|f| fb.binary_search(f).is_ok())
            .map(|&f| (copy(e.i, f), copy(e.j, f)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        for (a, b) in pairs {
            elements.push(Element::new(a, b, e.gamma));
            element_map.push(idx);
        }
    }

    let positions = pi.iter().map(|&p| truss.position(p)).collect();
    let extended = Truss::new(positions, elements, Some(faces))?;
    let rho = (0..truss.faces().len()).collect();
    let ext = FretsawExtension {
        extended,
        rho,
        pi,
        element_map,
        copy_of,
        n,
    };

    let report = structure_report(truss, q, &ext, h);
    if !report.h_subset_of_q {
        return Err(Error::InvariantViolated("extended rigidity graph misses an edge of H".into()));
    }
    if report.extra_edges > report.k {
        return Err(Error::InvariantViolated(format!(
            "{} extended rigidity edges outside H, budget {}",
            report.extra_edges, report.k
        )));
    }
    Ok(ext)
}

/// Structural facts relating an extension to the subgraph it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StructureReport {
    /// Every edge of `rho^-1(H)` is a rigidity edge of the extension.
    pub h_subset_of_q: bool,
    /// `|Q' - H'|`.
    pub extra_edges: usize,
    /// `|H| - (n_f - 1)`.
    pub k: usize,
    pub stiffly_connected: bool,
}

pub fn structure_report(
    truss: &Truss,
    q: &RigidityGraph,
    ext: &FretsawExtension,
    h: &[EdgeId],
) -> StructureReport {
    let qe = rigidity_graph(&ext.extended);
    let mut in_h = vec![false; qe.edge_count()];
    let mut subset = true;
    for &e in h {
        let (f, g) = q.graph.edge(e);
        match qe.edge_between(ext.rho_inverse(f), ext.rho_inverse(g)) {
            Some(x) => in_h[x] = true,
            None => subset = false,
        }
    }
    StructureReport {
        h_subset_of_q: subset,
        extra_edges: in_h.iter().filter(|x| !**x).count(),
        k: h.len() + 1 - truss.faces().len(),
        stiffly_connected: stiffness_witness(&ext.extended, &qe).is_none(),
    }
}

impl FretsawExtension {
    /// Extended face mapped to original face `f`.
    pub fn rho_inverse(&self, f: usize) -> usize {
        // rho is the identity on face indices
        debug_assert_eq!(self.rho[f], f);
        f
    }
}
