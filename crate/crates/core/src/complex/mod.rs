//! Simplicial topology of closed oriented 3-manifolds: construction,
//! validation, and integer (co)homology.
//!
//! Tetrahedra are supplied with per-corner integer *lifts*. Two edge (or
//! face) instances are glued exactly when their vertex ids and relative
//! lifts agree, so periodic identifications where distinct edges share both
//! endpoints (the n = 2 torus grid) are represented faithfully. Plain
//! meshes use zero lifts, where gluing degenerates to sorted vertex ids.

mod builders;

pub use builders::{
    build_surface_times_circle, build_three_torus, FiberKind, ModelKind, ModelMesh,
};

use crate::snf::{self, IntMat};
use std::collections::HashMap;

/// Local corner pairs of a tetrahedron, in storage order.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, thiserror::Error)]
pub enum ComplexError {
    #[error("tetrahedron {0} has repeated vertex ids")]
    DegenerateTetrahedron(usize),
    #[error("subdivision parameter {got} below minimum {min}")]
    TooCoarse { got: usize, min: usize },
    #[error("zero homology class where a nontrivial one is required")]
    ZeroClass,
    #[error("class has {got} coordinates, basis has rank {expected}")]
    ClassRankMismatch { expected: usize, got: usize },
    #[error("cocycle/cycle period pairing is not unimodular (det {det})")]
    NotUnimodular { det: i64 },
    #[error("homology computation failed: {0}")]
    Snf(#[from] snf::SnfError),
    #[error("builder produced an invalid complex: {0}")]
    InvalidBuild(String),
}

type EdgeKey = (usize, usize, [i64; 3]);
type FaceKey = ([usize; 3], [[i64; 3]; 2]);

/// Oriented closed simplicial 3-manifold with derived edge/face tables and
/// integer boundary maps.
pub struct SimplicialComplex3 {
    vertex_count: usize,
    tetrahedra: Vec<[usize; 4]>,
    tet_lifts: Vec<[[i64; 3]; 4]>,
    edges: Vec<[usize; 2]>,
    edge_rel_lift: Vec<[i64; 3]>,
    faces: Vec<[usize; 3]>,
    face_edges: Vec<[usize; 3]>,
    tet_edges: Vec<[usize; 6]>,
    tet_faces: Vec<[usize; 4]>,
    tet_face_signs: Vec<[i8; 4]>,
    face_tets: Vec<Vec<(usize, i8)>>,
    edge_index: HashMap<EdgeKey, usize>,
    coords: Option<Vec<[f64; 3]>>,
}

impl SimplicialComplex3 {
    /// Build from plain oriented tetrahedra (vertex-id gluing, zero lifts).
    pub fn from_tetrahedra(
        vertex_count: usize,
        tets: Vec<[usize; 4]>,
    ) -> Result<Self, ComplexError> {
        let lifts = vec![[[0i64; 3]; 4]; tets.len()];
        Self::from_lifted_tetrahedra(vertex_count, tets, lifts, None)
    }

    /// Build with explicit gluing lifts (periodic model builders).
    pub fn from_lifted_tetrahedra(
        vertex_count: usize,
        tets: Vec<[usize; 4]>,
        lifts: Vec<[[i64; 3]; 4]>,
        coords: Option<Vec<[f64; 3]>>,
    ) -> Result<Self, ComplexError> {
        assert_eq!(tets.len(), lifts.len());
        let mut edge_index: HashMap<EdgeKey, usize> = HashMap::new();
        let mut face_index: HashMap<FaceKey, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_rel_lift = Vec::new();
        let mut faces = Vec::new();
        let mut face_edges = Vec::new();
        let mut tet_edges = Vec::new();
        let mut tet_faces = Vec::new();
        let mut tet_face_signs = Vec::new();
        let mut face_tets: Vec<Vec<(usize, i8)>> = Vec::new();

        let intern_edge = |a: (usize, [i64; 3]),
                           b: (usize, [i64; 3]),
                           edges: &mut Vec<[usize; 2]>,
                           rel: &mut Vec<[i64; 3]>,
                           map: &mut HashMap<EdgeKey, usize>|
         -> usize {
            let ((ta, la), (hb, lb)) = if a.0 < b.0 { (a, b) } else { (b, a) };
            let d = [lb[0] - la[0], lb[1] - la[1], lb[2] - la[2]];
            *map.entry((ta, hb, d)).or_insert_with(|| {
                edges.push([ta, hb]);
                rel.push(d);
                edges.len() - 1
            })
        };

        for (t, (tet, lift)) in tets.iter().zip(lifts.iter()).enumerate() {
            let mut ids = *tet;
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::DegenerateTetrahedron(t));
            }
            if tet.iter().any(|&v| v >= vertex_count) {
                return Err(ComplexError::InvalidBuild(format!(
                    "tetrahedron {t} references vertex beyond count"
                )));
            }
            let mut te = [0usize; 6];
            for (slot, &(i, j)) in TET_EDGES.iter().enumerate() {
                te[slot] = intern_edge(
                    (tet[i], lift[i]),
                    (tet[j], lift[j]),
                    &mut edges,
                    &mut edge_rel_lift,
                    &mut edge_index,
                );
            }
            tet_edges.push(te);

            let mut tf = [0usize; 4];
            let mut tfs = [0i8; 4];
            for omit in 0..4 {
                let mut corners: Vec<(usize, [i64; 3])> = (0..4)
                    .filter(|&k| k != omit)
                    .map(|k| (tet[k], lift[k]))
                    .collect();
                // parity of the sort that brings the remaining corners to
                // ascending id order
                let mut perm_sign = 1i8;
                for i in 0..3 {
                    for j in i + 1..3 {
                        if corners[i].0 > corners[j].0 {
                            corners.swap(i, j);
                            perm_sign = -perm_sign;
                        }
                    }
                }
                let ids = [corners[0].0, corners[1].0, corners[2].0];
                let base = corners[0].1;
                let rel = [
                    [
                        corners[1].1[0] - base[0],
                        corners[1].1[1] - base[1],
                        corners[1].1[2] - base[2],
                    ],
                    [
                        corners[2].1[0] - base[0],
                        corners[2].1[1] - base[1],
                        corners[2].1[2] - base[2],
                    ],
                ];
                let f = *face_index.entry((ids, rel)).or_insert_with(|| {
                    let fe = [
                        intern_edge(
                            corners[1],
                            corners[2],
                            &mut edges,
                            &mut edge_rel_lift,
                            &mut edge_index,
                        ),
                        intern_edge(
                            corners[0],
                            corners[2],
                            &mut edges,
                            &mut edge_rel_lift,
                            &mut edge_index,
                        ),
                        intern_edge(
                            corners[0],
                            corners[1],
                            &mut edges,
                            &mut edge_rel_lift,
                            &mut edge_index,
                        ),
                    ];
                    faces.push(ids);
                    face_edges.push(fe);
                    face_tets.push(Vec::new());
                    faces.len() - 1
                });
                tf[omit] = f;
                let sign = perm_sign * if omit % 2 == 0 { 1 } else { -1 };
                tfs[omit] = sign;
                face_tets[f].push((t, sign));
            }
            tet_faces.push(tf);
            tet_face_signs.push(tfs);
        }

        Ok(Self {
            vertex_count,
            tetrahedra: tets,
            tet_lifts: lifts,
            edges,
            edge_rel_lift,
            faces,
            face_edges,
            tet_edges,
            tet_faces,
            tet_face_signs,
            face_tets,
            edge_index,
            coords,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn tet_count(&self) -> usize {
        self.tetrahedra.len()
    }

    pub fn tetrahedra(&self) -> &[[usize; 4]] {
        &self.tetrahedra
    }

    pub fn tet_lifts(&self) -> &[[[i64; 3]; 4]] {
        &self.tet_lifts
    }

    /// Canonical edge endpoints, tail id < head id.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_rel_lift(&self) -> &[[i64; 3]] {
        &self.edge_rel_lift
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Edge indices of each tetrahedron in [`TET_EDGES`] order.
    pub fn tet_edges(&self) -> &[[usize; 6]] {
        &self.tet_edges
    }

    pub fn tet_faces(&self) -> &[[usize; 4]] {
        &self.tet_faces
    }

    pub fn face_edges(&self) -> &[[usize; 3]] {
        &self.face_edges
    }

    /// Tetrahedra incident to a face, with the induced-orientation sign
    /// relative to the stored (sorted) face.
    pub fn face_tets(&self) -> &[Vec<(usize, i8)>] {
        &self.face_tets
    }

    pub fn coords(&self) -> Option<&[[f64; 3]]> {
        self.coords.as_deref()
    }

    /// Look up the edge from `a` to `b` whose head lift minus tail lift (in
    /// travel direction) is `rel`. Returns the index and +1 when the stored
    /// orientation matches the travel direction.
    pub fn find_edge(&self, a: usize, b: usize, rel: [i64; 3]) -> Option<(usize, i8)> {
        if a < b {
            self.edge_index.get(&(a, b, rel)).map(|&e| (e, 1))
        } else {
            let flipped = [-rel[0], -rel[1], -rel[2]];
            self.edge_index.get(&(b, a, flipped)).map(|&e| (e, -1))
        }
    }

    /// True when every edge and face is determined by its vertex ids alone
    /// (no lift-distinguished duplicates). Required for plain mesh export.
    pub fn is_vertex_faithful(&self) -> bool {
        let mut seen_e = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if seen_e.insert(*e, i).is_some() {
                return false;
            }
        }
        let mut seen_f = HashMap::new();
        for (i, f) in self.faces.iter().enumerate() {
            if seen_f.insert(*f, i).is_some() {
                return false;
            }
        }
        true
    }

    /// Integer boundary matrix from edges to vertices (V x E).
    pub fn boundary_1(&self) -> IntMat {
        let mut m = IntMat::zeros(self.vertex_count, self.edges.len());
        for (e, [a, b]) in self.edges.iter().enumerate() {
            m.set(*a, e, m.get(*a, e) - 1);
            m.set(*b, e, m.get(*b, e) + 1);
        }
        m
    }

    /// Integer boundary matrix from faces to edges (E x F).
    pub fn boundary_2(&self) -> IntMat {
        let mut m = IntMat::zeros(self.edges.len(), self.faces.len());
        for (f, fe) in self.face_edges.iter().enumerate() {
            // d[a,b,c] = [b,c] - [a,c] + [a,b]
            for (slot, sign) in [(0usize, 1i64), (1, -1), (2, 1)] {
                let e = fe[slot];
                m.set(e, f, m.get(e, f) + sign);
            }
        }
        m
    }

    /// Integer boundary matrix from tetrahedra to faces (F x T).
    pub fn boundary_3(&self) -> IntMat {
        let mut m = IntMat::zeros(self.faces.len(), self.tetrahedra.len());
        for (f, inc) in self.face_tets.iter().enumerate() {
            for &(t, sign) in inc {
                m.set(f, t, m.get(f, t) + sign as i64);
            }
        }
        m
    }

    /// Coboundary of a 1-cochain: per-face signed edge sums.
    pub fn coboundary_on_faces(&self, omega: &[f64]) -> Vec<f64> {
        self.face_edges
            .iter()
            .map(|fe| omega[fe[0]] - omega[fe[1]] + omega[fe[2]])
            .collect()
    }

    fn coboundary_on_faces_int(&self, omega: &[i64]) -> Vec<i64> {
        self.face_edges
            .iter()
            .map(|fe| omega[fe[0]] - omega[fe[1]] + omega[fe[2]])
            .collect()
    }

    /// Check every structural invariant; the report is empty iff valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        for (f, inc) in self.face_tets.iter().enumerate() {
            if inc.len() != 2 {
                violations.push(Violation::FaceNotClosed {
                    face: f,
                    tets: inc.len(),
                });
            } else if inc[0].1 + inc[1].1 != 0 {
                violations.push(Violation::OrientationClash { face: f });
            }
        }

        // chain conditions, accumulated sparsely per tet / per face
        'd2d3: for (t, tf) in self.tet_faces.iter().enumerate() {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for (omit, &f) in tf.iter().enumerate() {
                let sign = self.tet_face_signs[t][omit] as i64;
                for (slot, es) in [(0usize, 1i64), (1, -1), (2, 1)] {
                    let e = self.face_edges[f][slot];
                    *acc.entry(e).or_insert(0) += sign * es;
                }
            }
            if acc.values().any(|&v| v != 0) {
                violations.push(Violation::ChainComplexFailure {
                    composition: "d2.d3",
                });
                break 'd2d3;
            }
        }
        'd1d2: for fe in &self.face_edges {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for (slot, sign) in [(0usize, 1i64), (1, -1), (2, 1)] {
                let [a, b] = self.edges[fe[slot]];
                *acc.entry(a).or_insert(0) -= sign;
                *acc.entry(b).or_insert(0) += sign;
            }
            if acc.values().any(|&v| v != 0) {
                violations.push(Violation::ChainComplexFailure {
                    composition: "d1.d2",
                });
                break 'd1d2;
            }
        }

        let chi = self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
            - self.tetrahedra.len() as i64;
        if chi != 0 {
            violations.push(Violation::EulerCharacteristic { chi });
        }

        // vertex links: chi(link) = 2 and connected
        let mut edges_at: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for (e, [a, b]) in self.edges.iter().enumerate() {
            edges_at[*a].push(e);
            edges_at[*b].push(e);
        }
        let mut faces_at = vec![0usize; self.vertex_count];
        let mut link_unions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertex_count];
        for (f, ids) in self.faces.iter().enumerate() {
            let fe = self.face_edges[f];
            for (k, &v) in ids.iter().enumerate() {
                faces_at[v] += 1;
                // the two edges of this face containing v
                let (e1, e2) = match k {
                    0 => (fe[1], fe[2]),
                    1 => (fe[0], fe[2]),
                    _ => (fe[0], fe[1]),
                };
                link_unions[v].push((e1, e2));
            }
        }
        let mut tets_at = vec![0usize; self.vertex_count];
        for tet in &self.tetrahedra {
            for &v in tet {
                tets_at[v] += 1;
            }
        }
        for v in 0..self.vertex_count {
            let deg = edges_at[v].len() as i64;
            let chi_link = deg - faces_at[v] as i64 + tets_at[v] as i64;
            let connected = {
                let mut uf = UnionFind::new(self.edges.len());
                for &(a, b) in &link_unions[v] {
                    uf.union(a, b);
                }
                let mut root = None;
                let mut ok = !edges_at[v].is_empty();
                for &e in &edges_at[v] {
                    let r = uf.find(e);
                    match root {
                        None => root = Some(r),
                        Some(r0) if r0 != r => {
                            ok = false;
                            break;
                        }
                        _ => {}
                    }
                }
                ok
            };
            if chi_link != 2 || !connected {
                violations.push(Violation::BadVertexLink {
                    vertex: v,
                    chi_link,
                    connected,
                });
            }
        }

        ValidationReport { violations }
    }

    /// Betti numbers via integer Smith normal form of the boundary maps.
    /// Dense reduction — intended for desk-scale complexes.
    pub fn betti_numbers(&self) -> (usize, usize, usize, usize) {
        let r1 = snf::rank(&self.boundary_1());
        let r2 = snf::rank(&self.boundary_2());
        let r3 = snf::rank(&self.boundary_3());
        let b0 = self.vertex_count - r1;
        let b1 = self.edges.len() - r1 - r2;
        let b2 = self.faces.len() - r2 - r3;
        let b3 = self.tetrahedra.len() - r3;
        (b0, b1, b2, b3)
    }
}

/// Union-find over `usize` keys.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// One violated invariant, with the offending simplex.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FaceNotClosed {
        face: usize,
        tets: usize,
    },
    OrientationClash {
        face: usize,
    },
    BadVertexLink {
        vertex: usize,
        chi_link: i64,
        connected: bool,
    },
    ChainComplexFailure {
        composition: &'static str,
    },
    EulerCharacteristic {
        chi: i64,
    },
}

#[derive(Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v:?}")?;
        }
        Ok(())
    }
}

/// Degree-2 homology class in the coordinates of a stored cocycle basis
/// (Poincaré-dual degree-1 coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyClass {
    degree: u8,
    coords: Vec<i64>,
}

impl HomologyClass {
    pub fn surface(coords: Vec<i64>) -> Self {
        Self { degree: 2, coords }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Integer 1-cycle as signed multiples of canonical edges.
#[derive(Debug, Clone)]
pub struct Cycle {
    pub edges: Vec<(usize, i64)>,
}

impl Cycle {
    pub fn period_of(&self, cochain: &[i64]) -> i64 {
        self.edges.iter().map(|&(e, c)| c * cochain[e]).sum()
    }

    pub fn period_of_real(&self, cochain: &[f64]) -> f64 {
        self.edges.iter().map(|&(e, c)| c as f64 * cochain[e]).sum()
    }
}

/// Basis of H^1(M;Z)/torsion as closed integer 1-cochains.
#[derive(Debug, Clone)]
pub struct CocycleBasis {
    cocycles: Vec<Vec<i64>>,
}

impl CocycleBasis {
    pub fn new(c: &SimplicialComplex3, cocycles: Vec<Vec<i64>>) -> Result<Self, ComplexError> {
        for (i, w) in cocycles.iter().enumerate() {
            if w.len() != c.edge_count() {
                return Err(ComplexError::InvalidBuild(format!(
                    "cocycle {i} has wrong length"
                )));
            }
            if c.coboundary_on_faces_int(w).iter().any(|&v| v != 0) {
                return Err(ComplexError::InvalidBuild(format!(
                    "cocycle {i} is not closed"
                )));
            }
        }
        Ok(Self { cocycles })
    }

    pub fn rank(&self) -> usize {
        self.cocycles.len()
    }

    pub fn cocycles(&self) -> &[Vec<i64>] {
        &self.cocycles
    }

    /// Integer combination of basis cocycles with the class's coordinates.
    pub fn cocycle_for_class(&self, class: &HomologyClass) -> Result<Vec<i64>, ComplexError> {
        if class.coords().len() != self.rank() {
            return Err(ComplexError::ClassRankMismatch {
                expected: self.rank(),
                got: class.coords().len(),
            });
        }
        if class.is_zero() {
            return Err(ComplexError::ZeroClass);
        }
        let n = self.cocycles.first().map_or(0, Vec::len);
        let mut out = vec![0i64; n];
        for (coef, basis) in class.coords().iter().zip(&self.cocycles) {
            if *coef == 0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(basis) {
                *o += coef * b;
            }
        }
        Ok(out)
    }

    /// Pairing matrix `P[i][j] = <cocycle_i, cycle_j>`.
    pub fn period_matrix(&self, cycles: &[Cycle]) -> Vec<Vec<i64>> {
        self.cocycles
            .iter()
            .map(|w| cycles.iter().map(|z| z.period_of(w)).collect())
            .collect()
    }

    /// Re-mix the basis so the pairing with the given cycles is the
    /// identity. Requires a square unimodular period matrix.
    pub fn align_to_cycles(&mut self, cycles: &[Cycle]) -> Result<(), ComplexError> {
        let p = self.period_matrix(cycles);
        let n = p.len();
        if n == 0 {
            return Ok(());
        }
        if cycles.len() != n {
            return Err(ComplexError::ClassRankMismatch {
                expected: n,
                got: cycles.len(),
            });
        }
        let det = int_det(&p);
        if det.abs() != 1 {
            return Err(ComplexError::NotUnimodular { det });
        }
        let inv = int_inverse_unimodular(&p, det);
        // new_i = sum_k inv[i][k] * old_k
        let m = self.cocycles[0].len();
        let mut fresh = vec![vec![0i64; m]; n];
        for i in 0..n {
            for k in 0..n {
                if inv[i][k] == 0 {
                    continue;
                }
                for e in 0..m {
                    fresh[i][e] += inv[i][k] * self.cocycles[k][e];
                }
            }
        }
        self.cocycles = fresh;
        Ok(())
    }
}

pub(crate) fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0i64;
    for (j, &v) in m[0].iter().enumerate() {
        if v == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let s = if j % 2 == 0 { 1 } else { -1 };
        det += s * v * int_det(&minor);
    }
    det
}

fn int_inverse_unimodular(m: &[Vec<i64>], det: i64) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = s * int_det(&minor) * det.signum();
        }
    }
    inv
}

/// Closed integer 1-cochains generating H^1(M;Z)/torsion, via Smith normal
/// form of the coboundary maps. Dense — desk-scale complexes only; model
/// builders attach an equivalent combinatorial basis instead.
pub fn integral_cocycle_basis(c: &SimplicialComplex3) -> Result<CocycleBasis, ComplexError> {
    let d1 = transpose(&c.boundary_2()); // F x E
    let d0 = transpose(&c.boundary_1()); // E x V
    let basis = snf::homology_free_basis(&d1, &d0)?;
    CocycleBasis::new(c, basis)
}

/// Integer 1-cycles generating H_1(M;Z)/torsion.
pub fn integral_cycle_basis(c: &SimplicialComplex3) -> Result<Vec<Cycle>, ComplexError> {
    let basis = snf::homology_free_basis(&c.boundary_1(), &c.boundary_2())?;
    Ok(basis
        .into_iter()
        .map(|v| Cycle {
            edges: v
                .into_iter()
                .enumerate()
                .filter(|&(_, coef)| coef != 0)
                .collect(),
        })
        .collect())
}

fn transpose(m: &IntMat) -> IntMat {
    IntMat::from_fn(m.cols, m.rows, |r, c| m.get(c, r))
}
