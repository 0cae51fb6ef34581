//! Regge edge-length metrics on a simplicial 3-manifold: per-tet volumes
//! and dihedral angles, deficit-angle scalar curvature, circumcentric dual
//! volumes, and the diagonal Hodge star weights used by the harmonic solver.
//!
//! Dual cells are signed circumcentric: each (edge, face, tet) flag
//! contributes `s_ef * s_ft * area(midpoint, face center, tet center)`,
//! negative when a circumcenter falls outside. Signed pieces keep the
//! algebraic identities exact (`sum_e w_e l_e^2 = 3 vol`, dual volumes
//! partition the total volume) on any realizable mesh.

use crate::complex::{ModelMesh, SimplicialComplex3, TET_EDGES};
use crate::geom::{
    self, cross, dot, embed_tetrahedron, midpoint, norm, scale, signed_volume, sub, KahanSum, Vec3,
};

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("edge {edge} has non-positive length {length}")]
    NonPositiveLength { edge: usize, length: f64 },
    #[error("tetrahedron {tet} is not realizable in Euclidean 3-space")]
    Unrealizable { tet: usize },
    #[error("length table has {got} entries, complex has {expected} edges")]
    LengthCount { expected: usize, got: usize },
    #[error("chart-sampled metrics need flat charts (3-torus builders)")]
    ChartMetricUnsupported,
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
}

/// Per-edge lengths with everything derived from them.
pub struct ReggeMetric {
    lengths: Vec<f64>,
    tet_volumes: Vec<f64>,
    tet_corners: Vec<[Vec3; 4]>,
    dihedral: Vec<[f64; 6]>,
    edge_dual_area: Vec<f64>,
    star_weights: Vec<f64>,
    edge_dual_volume: Vec<f64>,
    vertex_dual_volume: Vec<f64>,
    total_volume: f64,
    negative_weight_count: usize,
}

impl ReggeMetric {
    pub fn from_lengths(c: &SimplicialComplex3, lengths: Vec<f64>) -> Result<Self, MetricError> {
        if lengths.len() != c.edge_count() {
            return Err(MetricError::LengthCount {
                expected: c.edge_count(),
                got: lengths.len(),
            });
        }
        for (e, &l) in lengths.iter().enumerate() {
            if !(l > 0.0) {
                return Err(MetricError::NonPositiveLength { edge: e, length: l });
            }
        }
        let nt = c.tet_count();
        let mut tet_volumes = Vec::with_capacity(nt);
        let mut tet_corners = Vec::with_capacity(nt);
        let mut dihedral = Vec::with_capacity(nt);
        let mut edge_dual_area = vec![KahanSum::new(); c.edge_count()];
        let mut vertex_dual = vec![KahanSum::new(); c.vertex_count()];
        let mut total = KahanSum::new();

        for (t, te) in c.tet_edges().iter().enumerate() {
            let mut l = [[0.0f64; 4]; 4];
            for (slot, &(i, j)) in TET_EDGES.iter().enumerate() {
                l[i][j] = lengths[te[slot]];
                l[j][i] = l[i][j];
            }
            let corners = embed_tetrahedron(&l).ok_or(MetricError::Unrealizable { tet: t })?;
            let vol = signed_volume(&corners);
            if !(vol > 0.0) {
                return Err(MetricError::Unrealizable { tet: t });
            }
            let cc =
                geom::tet_circumcenter(&corners).ok_or(MetricError::Unrealizable { tet: t })?;
            // face circumcenters, indexed by the omitted corner
            let mut fc = [[0.0f64; 3]; 4];
            for omit in 0..4 {
                let idx: Vec<usize> = (0..4).filter(|&k| k != omit).collect();
                fc[omit] =
                    geom::tri_circumcenter(corners[idx[0]], corners[idx[1]], corners[idx[2]])
                        .ok_or(MetricError::Unrealizable { tet: t })?;
            }

            let mut angles = [0.0f64; 6];
            for (slot, &(i, j)) in TET_EDGES.iter().enumerate() {
                let others: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
                let (k1, k2) = (others[0], others[1]);
                angles[slot] =
                    geom::dihedral_angle(corners[i], corners[j], corners[k1], corners[k2]);

                // signed circumcentric dual-area pieces for this edge: one
                // triangle (edge midpoint, face center, tet center) per
                // incident face, signed by which side the centers fall on
                let me = midpoint(corners[i], corners[j]);
                for (kf, kop) in [(k1, k2), (k2, k1)] {
                    let cf = fc[kop]; // face (i, j, kf) omits corner kop
                    let s_ef = side_of_edge_in_face(corners[i], corners[j], corners[kf], cf);
                    let s_ft =
                        side_of_face_in_tet(corners[i], corners[j], corners[kf], corners[kop], cc);
                    let piece = s_ef * s_ft * triangle_area(me, cf, cc);
                    edge_dual_area[te[slot]].add(piece);
                    // elementary dual volumes at the two endpoints
                    for v in [i, j] {
                        let ev = signed_volume(&[corners[v], me, cf, cc]).abs() * s_ef * s_ft;
                        vertex_dual[c.tetrahedra()[t][v]].add(ev);
                    }
                }
            }
            dihedral.push(angles);
            tet_volumes.push(vol);
            tet_corners.push(corners);
            total.add(vol);
        }

        let edge_dual_area: Vec<f64> = edge_dual_area.iter().map(|k| k.value()).collect();
        let star_weights: Vec<f64> = edge_dual_area
            .iter()
            .zip(&lengths)
            .map(|(&a, &l)| a / l)
            .collect();
        let edge_dual_volume: Vec<f64> = edge_dual_area
            .iter()
            .zip(&lengths)
            .map(|(&a, &l)| a * l / 3.0)
            .collect();
        // weights that vanish to rounding (degenerate-Delaunay meshes such
        // as the cube grid) are not warnings; genuinely negative ones are
        let w_scale = star_weights.iter().fold(0.0f64, |m, &w| m.max(w.abs()));
        let negative_weight_count = star_weights
            .iter()
            .filter(|&&w| w < -1e-12 * w_scale)
            .count();

        Ok(Self {
            lengths,
            tet_volumes,
            tet_corners,
            dihedral,
            edge_dual_area,
            star_weights,
            edge_dual_volume,
            vertex_dual_volume: vertex_dual.iter().map(|k| k.value()).collect(),
            total_volume: total.value(),
            negative_weight_count,
        })
    }

    /// Metric induced by the builder's local charts (the model product or
    /// flat metric).
    pub fn from_model(mesh: &ModelMesh) -> Result<Self, MetricError> {
        let lengths = mesh.chart_edge_lengths()?;
        Self::from_lengths(&mesh.complex, lengths)
    }

    /// Edge lengths sampled from a smooth metric tensor on the chart
    /// domain: 3-point Gauss–Legendre quadrature of `sqrt(d^T g(x) d)`
    /// along each straight chart segment. Charts must be flat (zero circle
    /// component), i.e. 3-torus builders.
    pub fn from_chart_metric(
        mesh: &ModelMesh,
        metric: impl Fn([f64; 3]) -> [[f64; 3]; 3],
    ) -> Result<Self, MetricError> {
        if mesh.charts.iter().any(|ch| ch.iter().any(|p| p[3] != 0.0)) {
            return Err(MetricError::ChartMetricUnsupported);
        }
        let c = &mesh.complex;
        let mut lengths = vec![f64::NAN; c.edge_count()];
        for (t, te) in c.tet_edges().iter().enumerate() {
            for (slot, &(i, j)) in TET_EDGES.iter().enumerate() {
                if !lengths[te[slot]].is_nan() {
                    continue;
                }
                let a = [
                    mesh.charts[t][i][0],
                    mesh.charts[t][i][1],
                    mesh.charts[t][i][2],
                ];
                let b = [
                    mesh.charts[t][j][0],
                    mesh.charts[t][j][1],
                    mesh.charts[t][j][2],
                ];
                lengths[te[slot]] = segment_length(a, b, &metric);
            }
        }
        Self::from_lengths(c, lengths)
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn tet_volumes(&self) -> &[f64] {
        &self.tet_volumes
    }

    /// Isometric embedding of each tetrahedron (corner order matches the
    /// stored tetrahedron).
    pub fn tet_corners(&self) -> &[[Vec3; 4]] {
        &self.tet_corners
    }

    /// Dihedral angles per tet in [`TET_EDGES`] order.
    pub fn dihedral_angles(&self) -> &[[f64; 6]] {
        &self.dihedral
    }

    pub fn edge_dual_area(&self) -> &[f64] {
        &self.edge_dual_area
    }

    /// Diagonal Hodge star weights `w_e = (dual face area) / length`.
    pub fn star_weights(&self) -> &[f64] {
        &self.star_weights
    }

    pub fn edge_dual_volume(&self) -> &[f64] {
        &self.edge_dual_volume
    }

    pub fn vertex_dual_volume(&self) -> &[f64] {
        &self.vertex_dual_volume
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Number of non-positive star weights (non-Delaunay configurations).
    /// They are kept, not clamped; downstream solvers report indefiniteness.
    pub fn negative_weight_count(&self) -> usize {
        self.negative_weight_count
    }

    /// Copy with all lengths multiplied by `lambda`.
    pub fn scaled(&self, c: &SimplicialComplex3, lambda: f64) -> Result<Self, MetricError> {
        Self::from_lengths(c, self.lengths.iter().map(|l| l * lambda).collect())
    }
}

fn triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    0.5 * norm(cross(sub(b, a), sub(c, a)))
}

/// +1 if the face circumcenter lies on the same side of the edge line
/// (within the face plane) as the opposite corner, else -1.
fn side_of_edge_in_face(pi: Vec3, pj: Vec3, pk: Vec3, cf: Vec3) -> f64 {
    let e = sub(pj, pi);
    let to_k = sub(pk, pi);
    let in_plane_normal = sub(to_k, scale(e, dot(to_k, e) / dot(e, e)));
    let me = midpoint(pi, pj);
    if dot(in_plane_normal, sub(cf, me)) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// +1 if the tet circumcenter lies on the same side of the face plane as
/// the opposite corner, else -1.
fn side_of_face_in_tet(pi: Vec3, pj: Vec3, pk: Vec3, pop: Vec3, ct: Vec3) -> f64 {
    let n = cross(sub(pj, pi), sub(pk, pi));
    let s_op = dot(n, sub(pop, pi));
    let s_ct = dot(n, sub(ct, pi));
    if s_op * s_ct >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn segment_length(a: Vec3, b: Vec3, metric: &impl Fn([f64; 3]) -> [[f64; 3]; 3]) -> f64 {
    // 3-point Gauss-Legendre on [0,1]
    const NODES: [(f64, f64); 3] = [
        (0.112701665379258, 0.277777777777778),
        (0.5, 0.444444444444444),
        (0.887298334620742, 0.277777777777778),
    ];
    let d = sub(b, a);
    let mut acc = 0.0;
    for (x, w) in NODES {
        let p = [a[0] + x * d[0], a[1] + x * d[1], a[2] + x * d[2]];
        let g = metric(p);
        let mut q = 0.0;
        for r in 0..3 {
            for s in 0..3 {
                q += d[r] * g[r][s] * d[s];
            }
        }
        acc += w * q.max(0.0).sqrt();
    }
    acc
}

/// Deficit angles and the lumped scalar-curvature density.
pub struct CurvatureField {
    deficit: Vec<f64>,
    lumped_r: Vec<f64>,
    total_curvature: f64,
}

impl CurvatureField {
    pub fn deficits(&self) -> &[f64] {
        &self.deficit
    }

    /// Lumped density `R_e = 2 eps_e l_e / V_e`.
    pub fn lumped_r(&self) -> &[f64] {
        &self.lumped_r
    }

    /// `int R dV := 2 sum_e eps_e l_e`.
    pub fn total_curvature(&self) -> f64 {
        self.total_curvature
    }

    #[cfg(test)]
    pub(crate) fn synthetic(lumped_r: Vec<f64>) -> Self {
        Self {
            deficit: vec![0.0; lumped_r.len()],
            lumped_r,
            total_curvature: 0.0,
        }
    }
}

/// Deficit angle per edge: `2 pi` minus the incident dihedral angles.
pub fn deficit_angles(c: &SimplicialComplex3, g: &ReggeMetric) -> CurvatureField {
    let mut sums = vec![KahanSum::new(); c.edge_count()];
    for (t, te) in c.tet_edges().iter().enumerate() {
        for (slot, &e) in te.iter().enumerate() {
            sums[e].add(g.dihedral_angles()[t][slot]);
        }
    }
    let deficit: Vec<f64> = sums
        .iter()
        .map(|s| 2.0 * std::f64::consts::PI - s.value())
        .collect();
    // edges whose dual cell vanishes to rounding carry no lumped density
    let v_floor = 1e-10 * g.total_volume() / c.edge_count() as f64;
    let lumped_r: Vec<f64> = deficit
        .iter()
        .zip(g.lengths())
        .zip(g.edge_dual_volume())
        .map(|((&eps, &l), &v)| {
            if v.abs() > v_floor {
                2.0 * eps * l / v
            } else {
                0.0
            }
        })
        .collect();
    let mut total = KahanSum::new();
    for (&eps, &l) in deficit.iter().zip(g.lengths()) {
        total.add(2.0 * eps * l);
    }
    CurvatureField {
        deficit,
        lumped_r,
        total_curvature: total.value(),
    }
}

/// (min R, ||R^-||_L2, int R dV) from the lumped density.
pub struct ScalarStats {
    pub min_r: f64,
    pub neg_l2: f64,
    pub total_curvature: f64,
}

pub fn scalar_stats(field: &CurvatureField, g: &ReggeMetric) -> ScalarStats {
    let min_r = field.lumped_r.iter().copied().fold(f64::INFINITY, f64::min);
    let mut neg = KahanSum::new();
    for (&r, &v) in field.lumped_r.iter().zip(g.edge_dual_volume()) {
        let rm = r.min(0.0);
        neg.add(rm * rm * v);
    }
    ScalarStats {
        min_r,
        neg_l2: neg.value().max(0.0).sqrt(),
        total_curvature: field.total_curvature,
    }
}
