//! Truss data model: vertices, weighted bar elements and triangular faces,
//! plus the face-adjacency (rigidity) graph built on top of them.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result, StiffnessWitness};
use crate::geometry::{angle_at, barycentric, signed_area, Vec2};
use crate::graph::{EdgeId, Graph};

/// Candidate triangles with area below this are treated as collinear.
pub const DEGENERATE_AREA: f64 = 1e-12;
/// Barycentric slack for the strict point-in-triangle test.
pub const INTERIOR_TOL: f64 = 1e-10;
/// Elements shorter than this are rejected.
pub const MIN_LENGTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Element {
    pub i: usize,
    pub j: usize,
    pub gamma: f64,
}

impl Element {
    pub fn new(i: usize, j: usize, gamma: f64) -> Self {
        Self { i, j, gamma }
    }

    fn key(&self) -> (usize, usize) {
        (self.i.min(self.j), self.i.max(self.j))
    }
}

pub type Face = [usize; 3];

/// A 2-D truss. Immutable once validated.
#[derive(Debug, Clone)]
pub struct Truss {
    positions: Vec<Vec2>,
    elements: Vec<Element>,
    faces: Vec<Face>,
    element_index: HashMap<(usize, usize), usize>,
    faces_of_vertex: Vec<Vec<usize>>,
}

impl Truss {
    /// Validates and builds a truss. When `faces` is `None` they are inferred
    /// from the elements.
    pub fn new(positions: Vec<Vec2>, elements: Vec<Element>, faces: Option<Vec<Face>>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::InvalidTruss("no vertices".into()));
        }
        if let Some(k) = positions.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidTruss(format!("vertex {k} has a non-finite position")));
        }
        let mut element_index = HashMap::with_capacity(elements.len());
        for (idx, e) in elements.iter().enumerate() {
            if e.i >= n || e.j >= n {
                return Err(Error::InvalidTruss(format!(
                    "element {idx} ({}, {}) references a missing vertex",
                    e.i, e.j
                )));
            }
            if e.i == e.j {
                return Err(Error::InvalidTruss(format!("element {idx} is a loop at {}", e.i)));
            }
            if !(e.gamma > 0.0 && e.gamma.is_finite()) {
                return Err(Error::InvalidTruss(format!(
                    "element {idx} has non-positive weight {}",
                    e.gamma
                )));
            }
            if (positions[e.i] - positions[e.j]).norm() < MIN_LENGTH {
                return Err(Error::ZeroLengthElement(e.i, e.j));
            }
            if element_index.insert(e.key(), idx).is_some() {
                return Err(Error::InvalidTruss(format!(
                    "duplicate element ({}, {})",
                    e.i, e.j
                )));
            }
        }

        let faces = match faces {
            None => infer_faces(&positions, &elements)?,
            Some(mut faces) => {
                for f in faces.iter_mut() {
                    f.sort_unstable();
                    if f[2] >= n {
                        return Err(Error::InvalidTruss(format!("face {f:?} references a missing vertex")));
                    }
                    if f[0] == f[1] || f[1] == f[2] {
                        return Err(Error::InvalidTruss(format!("face {f:?} repeats a vertex")));
                    }
                    for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
                        if !element_index.contains_key(&(a, b)) {
                            return Err(Error::InvalidTruss(format!(
                                "face {f:?} uses missing element ({a}, {b})"
                            )));
                        }
                    }
                    let [a, b, c] = f.map(|v| positions[v]);
                    if signed_area(a, b, c).abs() < DEGENERATE_AREA {
                        return Err(Error::DegenerateFace(f[0], f[1], f[2]));
                    }
                }
                let mut sorted = faces.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidTruss("duplicate face".into()));
                }
                if let Some((f, v)) = first_interior_vertex(&positions, &faces) {
                    return Err(Error::InvalidTruss(format!(
                        "vertex {v} lies strictly inside face {f:?}"
                    )));
                }
                faces
            }
        };

        let mut faces_of_vertex = vec![Vec::new(); n];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                faces_of_vertex[v].push(fi);
            }
        }

        let mut covered = vec![false; elements.len()];
        for f in &faces {
            for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
                covered[element_index[&(a, b)]] = true;
            }
        }
        if let Some(idx) = covered.iter().position(|c| !c) {
            let e = elements[idx];
            return Err(Error::InvalidTruss(format!(
                "element ({}, {}) is not contained in any face",
                e.i, e.j
            )));
        }

        Ok(Self {
            positions,
            elements,
            faces,
            element_index,
            faces_of_vertex,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn dof(&self) -> usize {
        2 * self.positions.len()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Vec2 {
        self.positions[v]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Index of the element joining `i` and `j`, if any.
    pub fn element_between(&self, i: usize, j: usize) -> Option<usize> {
        self.element_index.get(&(i.min(j), i.max(j))).copied()
    }

    /// Faces containing vertex `v`, ascending.
    pub fn faces_of(&self, v: usize) -> &[usize] {
        &self.faces_of_vertex[v]
    }

    pub fn element_length(&self, idx: usize) -> f64 {
        let e = self.elements[idx];
        (self.positions[e.i] - self.positions[e.j]).norm()
    }

    /// Same truss with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let elements = self
            .elements
            .iter()
            .map(|e| Element::new(e.i, e.j, e.gamma * c))
            .collect();
        Self::new(self.positions.clone(), elements, Some(self.faces.clone()))
    }
}

fn first_interior_vertex(positions: &[Vec2], faces: &[Face]) -> Option<(Face, usize)> {
    // bucket vertices on a coarse grid so each face only tests nearby points
    let (mut lo, mut hi) = (positions[0], positions[0]);
    for p in positions {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let cells = ((positions.len() as f64).sqrt().ceil() as usize).max(1);
    let span = (hi - lo).map(|s| if s > 0.0 { s } else { 1.0 });
    let cell_of = |p: Vec2| -> (usize, usize) {
        let cx = (((p.x - lo.x) / span.x) * cells as f64).floor() as isize;
        let cy = (((p.y - lo.y) / span.y) * cells as f64).floor() as isize;
        (
            cx.clamp(0, cells as isize - 1) as usize,
            cy.clamp(0, cells as isize - 1) as usize,
        )
    };
    let mut buckets = vec![Vec::new(); cells * cells];
    for (v, &p) in positions.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        buckets[cy * cells + cx].push(v);
    }
    for f in faces {
        let [a, b, c] = f.map(|v| positions[v]);
        let (x0, y0) = cell_of(a.inf(&b).inf(&c));
        let (x1, y1) = cell_of(a.sup(&b).sup(&c));
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                for &v in &buckets[cy * cells + cx] {
                    if f.contains(&v) {
                        continue;
                    }
                    if let Some(l) = barycentric(positions[v], a, b, c) {
                        if l.iter().all(|&t| t > INTERIOR_TOL) {
                            return Some((*f, v));
                        }
                    }
                }
            }
        }
    }
    None
}

/// Every vertex triple whose three edges are elements and whose open triangle
/// contains no vertex, ascending.
pub fn infer_faces(positions: &[Vec2], elements: &[Element]) -> Result<Vec<Face>> {
    let n = positions.len();
    let mut adj = vec![Vec::new(); n];
    for e in elements {
        adj[e.i].push(e.j);
        adj[e.j].push(e.i);
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut candidates = Vec::new();
    for i in 0..n {
        for &j in adj[i].iter().filter(|&&j| j > i) {
            // common neighbours k > j of i and j
            let (mut p, mut q) = (0, 0);
            let (ai, aj) = (&adj[i], &adj[j]);
            while p < ai.len() && q < aj.len() {
                match ai[p].cmp(&aj[q]) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        let k = ai[p];
                        if k > j {
                            candidates.push([i, j, k]);
                        }
                        p += 1;
                        q += 1;
                    }
                }
            }
        }
    }
    let mut faces = Vec::with_capacity(candidates.len());
    for f in candidates {
        let [a, b, c] = f.map(|v| positions[v]);
        if signed_area(a, b, c).abs() < DEGENERATE_AREA {
            return Err(Error::DegenerateFace(f[0], f[1], f[2]));
        }
        if first_interior_vertex(positions, &[f]).is_none() {
            faces.push(f);
        }
    }
    faces.sort_unstable();
    Ok(faces)
}

/// Graph on faces with an edge wherever two faces share an element.
#[derive(Debug, Clone)]
pub struct RigidityGraph {
    pub graph: Graph,
    /// Element shared by the two faces of each rigidity edge.
    pub shared_element: Vec<usize>,
}

impl RigidityGraph {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn edge_between(&self, f1: usize, f2: usize) -> Option<EdgeId> {
        self.graph.find_edge(f1, f2)
    }
}

pub fn rigidity_graph(truss: &Truss) -> RigidityGraph {
    let mut faces_of_element: Vec<Vec<usize>> = vec![Vec::new(); truss.elements().len()];
    for (fi, f) in truss.faces().iter().enumerate() {
        for (a, b) in [(f[0], f[1]), (f[0], f[2]), (f[1], f[2])] {
            faces_of_element[truss.element_index[&(a, b)]].push(fi);
        }
    }
    let mut edges = Vec::new();
    let mut shared_element = Vec::new();
    for (el, fs) in faces_of_element.iter().enumerate() {
        for x in 0..fs.len() {
            for y in x + 1..fs.len() {
                edges.push((fs[x], fs[y]));
                shared_element.push(el);
            }
        }
    }
    let graph = Graph::new(truss.faces().len(), edges)
        .expect("two distinct faces share at most one element");
    RigidityGraph {
        graph,
        shared_element,
    }
}

/// Checks the stiffly-connected condition. Per-vertex face neighbourhoods are
/// checked before global connectivity, so the witness names a vertex whenever
/// one is at fault.
pub fn stiffness_witness(truss: &Truss, q: &RigidityGraph) -> Option<StiffnessWitness> {
    let n = truss.vertex_count();
    let mut local = vec![usize::MAX; q.node_count()];
    for v in 0..n {
        let fv = truss.faces_of(v);
        if fv.is_empty() {
            return Some(StiffnessWitness::Vertex(v));
        }
        for (slot, &f) in fv.iter().enumerate() {
            local[f] = slot;
        }
        let mut uf = rustworkx_core::petgraph::unionfind::UnionFind::<usize>::new(fv.len());
        let mut merges = 0;
        for &f in fv {
            for &(g, _) in q.graph.neighbors(f) {
                if local[g] != usize::MAX && uf.union(local[f], local[g]) {
                    merges += 1;
                }
            }
        }
        for &f in fv {
            local[f] = usize::MAX;
        }
        if merges + 1 != fv.len() {
            return Some(StiffnessWitness::Vertex(v));
        }
    }
    if !q.graph.is_connected() {
        return Some(StiffnessWitness::Global);
    }
    None
}

pub fn is_stiffly_connected(truss: &Truss) -> (bool, Option<StiffnessWitness>) {
    let w = stiffness_witness(truss, &rigidity_graph(truss));
    (w.is_none(), w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrussQualityBounds {
    pub l_min: f64,
    pub l_max: f64,
    pub theta_min: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
}

pub fn quality_bounds(truss: &Truss) -> TrussQualityBounds {
    let mut b = TrussQualityBounds {
        l_min: f64::INFINITY,
        l_max: 0.0,
        theta_min: std::f64::consts::PI,
        gamma_min: f64::INFINITY,
        gamma_max: 0.0,
    };
    for (idx, e) in truss.elements().iter().enumerate() {
        let l = truss.element_length(idx);
        b.l_min = b.l_min.min(l);
        b.l_max = b.l_max.max(l);
        b.gamma_min = b.gamma_min.min(e.gamma);
        b.gamma_max = b.gamma_max.max(e.gamma);
    }
    for f in truss.faces() {
        let [a, p, c] = f.map(|v| truss.position(v));
        b.theta_min = b
            .theta_min
            .min(angle_at(a, p, c))
            .min(angle_at(p, c, a))
            .min(angle_at(c, a, p));
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn triangle() -> Truss {
        Truss::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(0.5, 3f64.sqrt() / 2.0)],
            vec![Element::new(0, 1, 1.0), Element::new(1, 2, 1.0), Element::new(0, 2, 1.0)],
            None,
        )
        .unwrap()
    }

    fn two_triangles() -> Truss {
        Truss::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0), v(1.0, 1.0)],
            vec![
                Element::new(0, 1, 1.0),
                Element::new(0, 2, 1.0),
                Element::new(1, 2, 1.0),
                Element::new(1, 3, 1.0),
                Element::new(2, 3, 1.0),
            ],
            None,
        )
        .unwrap()
    }

    fn bowtie() -> Truss {
        Truss::new(
            vec![v(-1.0, -0.5), v(-1.0, 0.5), v(0.0, 0.0), v(1.0, -0.5), v(1.0, 0.5)],
            vec![
                Element::new(0, 1, 1.0),
                Element::new(0, 2, 1.0),
                Element::new(1, 2, 1.0),
                Element::new(2, 3, 1.0),
                Element::new(2, 4, 1.0),
                Element::new(3, 4, 1.0),
            ],
            None,
        )
        .unwrap()
    }

    /// (rows x cols) vertex grid with one diagonal per cell.
    fn grid(rows: usize, cols: usize) -> Truss {
        let id = |r: usize, c: usize| r * cols + c;
        let mut pos = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                pos.push(v(c as f64, r as f64));
            }
        }
        let mut el = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    el.push(Element::new(id(r, c), id(r, c + 1), 1.0));
                }
                if r + 1 < rows {
                    el.push(Element::new(id(r, c), id(r + 1, c), 1.0));
                }
                if r + 1 < rows && c + 1 < cols {
                    el.push(Element::new(id(r, c), id(r + 1, c + 1), 1.0));
                }
            }
        }
        Truss::new(pos, el, None).unwrap()
    }

    #[test]
    fn infer_single_triangle() {
        assert_eq!(triangle().faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn infer_quadrilateral_without_diagonals() {
        let pos = vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        let el = vec![
            Element::new(0, 1, 1.0),
            Element::new(1, 2, 1.0),
            Element::new(2, 3, 1.0),
            Element::new(3, 0, 1.0),
        ];
        assert!(infer_faces(&pos, &el).unwrap().is_empty());
        // a truss needs every element in a face
        assert!(Truss::new(pos, el, None).is_err());
    }

    #[test]
    fn infer_grid_faces() {
        let t = grid(3, 3);
        assert_eq!(t.elements().len(), 16);
        assert_eq!(t.faces().len(), 8);
    }

    #[test]
    fn infer_skips_triangles_containing_a_vertex() {
        // big triangle with a centre vertex joined to all corners: only the
        // three small triangles are faces
        let pos = vec![v(0.0, 0.0), v(4.0, 0.0), v(2.0, 4.0), v(2.0, 1.0)];
        let el = vec![
            Element::new(0, 1, 1.0),
            Element::new(1, 2, 1.0),
            Element::new(0, 2, 1.0),
            Element::new(0, 3, 1.0),
            Element::new(1, 3, 1.0),
            Element::new(2, 3, 1.0),
        ];
        let faces = infer_faces(&pos, &el).unwrap();
        assert_eq!(faces, vec![[0, 1, 3], [0, 2, 3], [1, 2, 3]]);
    }

    #[test]
    fn collinear_candidate_is_degenerate() {
        let pos = vec![v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)];
        let el = vec![Element::new(0, 1, 1.0), Element::new(1, 2, 1.0), Element::new(0, 2, 1.0)];
        assert!(matches!(infer_faces(&pos, &el), Err(Error::DegenerateFace(0, 1, 2))));
    }

    #[test]
    fn rejects_bad_elements() {
        let pos = vec![v(0.0, 0.0), v(0.0, 0.0), v(1.0, 0.0)];
        let r = Truss::new(pos, vec![Element::new(0, 1, 1.0)], None);
        assert!(matches!(r, Err(Error::ZeroLengthElement(0, 1))));
        let pos = vec![v(0.0, 0.0), v(1.0, 0.0)];
        assert!(Truss::new(pos.clone(), vec![Element::new(0, 1, 0.0)], None).is_err());
        assert!(Truss::new(pos.clone(), vec![Element::new(0, 2, 1.0)], None).is_err());
        assert!(Truss::new(
            pos,
            vec![Element::new(0, 1, 1.0), Element::new(1, 0, 2.0)],
            None
        )
        .is_err());
    }

    #[test]
    fn explicit_face_must_use_elements() {
        let t = triangle();
        let r = Truss::new(
            t.positions().to_vec(),
            t.elements()[..2].to_vec(),
            Some(vec![[0, 1, 2]]),
        );
        assert!(r.is_err());
    }

    #[test]
    fn rigidity_graph_examples() {
        assert_eq!(rigidity_graph(&triangle()).edge_count(), 0);
        let q = rigidity_graph(&two_triangles());
        assert_eq!((q.node_count(), q.edge_count()), (2, 1));
        let q = rigidity_graph(&grid(3, 3));
        assert_eq!((q.node_count(), q.edge_count()), (8, 8));
        for f in 0..q.node_count() {
            assert!(q.graph.degree(f) <= 3);
        }
    }

    #[test]
    fn stiffly_connected_examples() {
        assert_eq!(is_stiffly_connected(&two_triangles()), (true, None));
        assert_eq!(
            is_stiffly_connected(&bowtie()),
            (false, Some(StiffnessWitness::Vertex(2)))
        );
        assert!(is_stiffly_connected(&grid(4, 4)).0);
    }

    #[test]
    fn quality_bounds_examples() {
        let b = quality_bounds(&triangle());
        assert!((b.l_min - 1.0).abs() < 1e-12 && (b.l_max - 1.0).abs() < 1e-12);
        assert!((b.theta_min - PI / 3.0).abs() < 1e-12);
        assert_eq!((b.gamma_min, b.gamma_max), (1.0, 1.0));

        let right = Truss::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)],
            vec![Element::new(0, 1, 1.0), Element::new(1, 2, 1.0), Element::new(0, 2, 1.0)],
            None,
        )
        .unwrap();
        let b = quality_bounds(&right);
        assert!((b.l_min - 1.0).abs() < 1e-12);
        assert!((b.l_max - 2f64.sqrt()).abs() < 1e-12);
        assert!((b.theta_min - PI / 4.0).abs() < 1e-12);
    }
}
