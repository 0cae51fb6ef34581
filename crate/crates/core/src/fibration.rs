//! Level surfaces of the circle-valued harmonic map: extraction by
//! marching tetrahedra, component topology (Euler characteristic, count),
//! areas, theta sweeps, and the coarea cross-check data.
//!
//! The map has no global lift. Each tetrahedron gets a local lift (corner
//! increments of `h`), and every integer translate of theta inside the lift
//! range is cut. Crossings are keyed by `(edge, crossing index)`, both
//! computed from per-vertex phases shared across tetrahedra, so adjacent
//! tetrahedra agree on shared surface vertices bit for bit.

use crate::complex::{Cycle, SimplicialComplex3, TET_EDGES};
use crate::geom::{cross, norm, solve3, sub, Vec3};
use crate::hodge::HarmonicOneForm;
use crate::metric::ReggeMetric;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum FibrationError {
    #[error("theta {theta} is within the regularity guard of a vertex phase; try {suggested}")]
    CriticalLevel { theta: f64, suggested: f64 },
    #[error("extracted surface is not closed: edge shared by {count} triangles")]
    NotClosed { count: usize },
    #[error("crossing parameter {lambda} outside (0,1) on edge {edge}")]
    CrossingMismatch { edge: usize, lambda: f64 },
    #[error("sweep needs at least 8 levels, got {0}")]
    TooFewLevels(usize),
    #[error("{rejected} of {total} sampled levels were near-critical")]
    TooManyRejected { rejected: usize, total: usize },
    #[error("surface export needs vertex coordinates on the complex")]
    NoCoordinates,
}

/// One crossing of the level set with a mesh edge.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceVertex {
    pub edge: usize,
    /// which integer translate of theta this crossing realizes
    pub crossing: i64,
    /// barycentric parameter along the canonical edge direction
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct Component {
    pub chi: i64,
    pub area: f64,
    pub triangle_count: usize,
}

/// An extracted fiber: a closed triangulated surface.
pub struct LevelSurface {
    theta: f64,
    vertices: Vec<SurfaceVertex>,
    triangles: Vec<[usize; 3]>,
    vertex_component: Vec<usize>,
    components: Vec<Component>,
    edge_count: usize,
}

impl LevelSurface {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn vertices(&self) -> &[SurfaceVertex] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.components.iter().map(|c| c.chi).sum()
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(|c| c.area).sum()
    }

    pub fn surface_edge_count(&self) -> usize {
        self.edge_count
    }

    /// `sum_i max(0, -chi_i)` over connected components.
    pub fn chi_minus(&self) -> i64 {
        self.components.iter().map(|c| (-c.chi).max(0)).sum()
    }

    /// Algebraic intersection number of one component with a 1-cycle:
    /// signed crossings of the cycle's edges by this component.
    pub fn component_pairing(&self, component: usize, cycle: &Cycle, h: &HarmonicOneForm) -> i64 {
        let mut acc = 0i64;
        for (vi, v) in self.vertices.iter().enumerate() {
            if self.vertex_component[vi] != component {
                continue;
            }
            for &(e, coef) in &cycle.edges {
                if e == v.edge {
                    acc += coef * h.values()[e].signum() as i64;
                }
            }
        }
        acc
    }

    /// Write the surface as ASCII (`vertices N` block of `x y z` lines,
    /// then `triangles M` of vertex index triples), positions interpolated
    /// from the complex's fundamental-domain coordinates.
    pub fn export_ascii(
        &self,
        c: &SimplicialComplex3,
        out: &mut impl std::io::Write,
    ) -> Result<(), std::io::Error> {
        let coords = match c.coords() {
            Some(x) => x,
            None => {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidInput,
                    FibrationError::NoCoordinates.to_string(),
                ))
            }
        };
        writeln!(out, "# hfib level surface")?;
        writeln!(
            out,
            "# theta {} components {} chi {} area {}",
            self.theta,
            self.component_count(),
            self.euler_characteristic(),
            self.area()
        )?;
        writeln!(out, "vertices {}", self.vertices.len())?;
        for v in &self.vertices {
            let [a, b] = c.edges()[v.edge];
            let (pa, pb) = (coords[a], coords[b]);
            let p = [
                pa[0] + v.lambda * (pb[0] - pa[0]),
                pa[1] + v.lambda * (pb[1] - pa[1]),
                pa[2] + v.lambda * (pb[2] - pa[2]),
            ];
            writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
        }
        writeln!(out, "triangles {}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Per-vertex phases of the circle map (mod 1), rooted at vertex 0 of each
/// connected component.
fn vertex_phases(c: &SimplicialComplex3, h: &[f64]) -> Vec<f64> {
    let n = c.vertex_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, [a, b]) in c.edges().iter().enumerate() {
        adj[*a].push((e, *b));
        adj[*b].push((e, *a));
    }
    let mut u = vec![f64::NAN; n];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if !u[root].is_nan() {
            continue;
        }
        u[root] = 0.0;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if u[w].is_nan() {
                    let [a, _] = c.edges()[e];
                    let step = if a == v { h[e] } else { -h[e] };
                    u[w] = (u[v] + step).rem_euclid(1.0);
                    queue.push_back(w);
                }
            }
        }
    }
    u
}

fn tet_edge_slot(i: usize, j: usize) -> usize {
    TET_EDGES
        .iter()
        .position(|&(a, b)| (a, b) == (i.min(j), i.max(j)))
        .expect("corner pair")
}

/// Extract the fiber over a regular value `theta`.
pub fn extract_level(
    c: &SimplicialComplex3,
    g: &ReggeMetric,
    h: &HarmonicOneForm,
    theta: f64,
) -> Result<LevelSurface, FibrationError> {
    let hv = h.values();
    let u = vertex_phases(c, hv);

    // regularity guard in units of the largest per-tet lift span
    let mut span = 0.0f64;
    let mut tet_lift = Vec::with_capacity(c.tet_count());
    for (t, te) in c.tet_edges().iter().enumerate() {
        let ids = c.tetrahedra()[t];
        let mut v = [0.0f64; 4];
        v[0] = u[ids[0]];
        for (slot, &(_, j)) in TET_EDGES.iter().enumerate().take(3) {
            let sign = if ids[0] < ids[j] { 1.0 } else { -1.0 };
            v[j] = v[0] + sign * hv[te[slot]];
        }
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        span = span.max(hi - lo);
        tet_lift.push(v);
    }
    let eps_reg = 1e-9 * span.max(1e-30);
    for &phase in &u {
        let d = (phase - theta).rem_euclid(1.0);
        if d < eps_reg || 1.0 - d < eps_reg {
            return Err(FibrationError::CriticalLevel {
                theta,
                suggested: theta + 3.0 * eps_reg,
            });
        }
    }

    let mut key_index: HashMap<(usize, i64), usize> = HashMap::new();
    let mut vertices: Vec<SurfaceVertex> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut tri_areas: Vec<f64> = Vec::new();

    for (t, te) in c.tet_edges().iter().enumerate() {
        let ids = c.tetrahedra()[t];
        let v = tet_lift[t];
        let corners = &g.tet_corners()[t];
        // integer offsets of the local lift against the global phases
        let offs: [i64; 4] = std::array::from_fn(|i| (v[i] - u[ids[i]]).round() as i64);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let k_lo = (lo - theta).ceil() as i64;
        let k_hi = (hi - theta).floor() as i64;
        for k in k_lo..=k_hi {
            let cut = theta + k as f64;
            if !(cut > lo && cut < hi) {
                continue;
            }
            let above: Vec<usize> = (0..4).filter(|&i| v[i] > cut).collect();
            if above.is_empty() || above.len() == 4 {
                continue;
            }
            let below: Vec<usize> = (0..4).filter(|&i| v[i] <= cut).collect();

            // gradient of the local lift, for orientation
            let m = [
                sub(corners[1], corners[0]),
                sub(corners[2], corners[0]),
                sub(corners[3], corners[0]),
            ];
            let grad = solve3(m, [v[1] - v[0], v[2] - v[0], v[3] - v[0]]).unwrap_or([0.0; 3]);

            let mut crossing = |i: usize, j: usize| -> Result<(usize, Vec3), FibrationError> {
                let slot = tet_edge_slot(i, j);
                let e = te[slot];
                let (ti, tj) = if ids[i] < ids[j] { (i, j) } else { (j, i) };
                let k_glob = k - offs[ti];
                let he = hv[e];
                let lambda = (theta + k_glob as f64 - u[ids[ti]]) / he;
                if !(lambda > -1e-6 && lambda < 1.0 + 1e-6) {
                    return Err(FibrationError::CrossingMismatch { edge: e, lambda });
                }
                let idx = *key_index.entry((e, k_glob)).or_insert_with(|| {
                    vertices.push(SurfaceVertex {
                        edge: e,
                        crossing: k_glob,
                        lambda,
                    });
                    vertices.len() - 1
                });
                // position in this tet's embedding
                let (pa, pb) = (corners[ti], corners[tj]);
                let mu = (cut - v[ti]) / (v[tj] - v[ti]);
                let pos = [
                    pa[0] + mu * (pb[0] - pa[0]),
                    pa[1] + mu * (pb[1] - pa[1]),
                    pa[2] + mu * (pb[2] - pa[2]),
                ];
                Ok((idx, pos))
            };

            let mut emit = |tri: [(usize, Vec3); 3]| {
                let e1 = sub(tri[1].1, tri[0].1);
                let e2 = sub(tri[2].1, tri[0].1);
                let n = cross(e1, e2);
                let mut t3 = [tri[0].0, tri[1].0, tri[2].0];
                if n[0] * grad[0] + n[1] * grad[1] + n[2] * grad[2] < 0.0 {
                    t3.swap(1, 2);
                }
                triangles.push(t3);
                tri_areas.push(0.5 * norm(n));
            };

            match above.len() {
                1 | 3 => {
                    let (apex, base) = if above.len() == 1 {
                        (above[0], below)
                    } else {
                        (below[0], above)
                    };
                    let a = crossing(apex, base[0])?;
                    let b = crossing(apex, base[1])?;
                    let cc = crossing(apex, base[2])?;
                    emit([a, b, cc]);
                }
                2 => {
                    let (x, y) = (above[0], above[1]);
                    let (z, w) = (below[0], below[1]);
                    let xz = crossing(x, z)?;
                    let xw = crossing(x, w)?;
                    let yw = crossing(y, w)?;
                    let yz = crossing(y, z)?;
                    emit([xz, xw, yw]);
                    emit([xz, yw, yz]);
                }
                _ => unreachable!(),
            }
        }
    }

    // closedness + components through shared triangle sides
    let mut side_first: HashMap<(usize, usize), usize> = HashMap::new();
    let mut side_count: HashMap<(usize, usize), usize> = HashMap::new();
    let mut uf = crate::complex::UnionFind::new(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
            let key = (a.min(b), a.max(b));
            *side_count.entry(key).or_insert(0) += 1;
            match side_first.get(&key) {
                None => {
                    side_first.insert(key, t);
                }
                Some(&t0) => uf.union(t0, t),
            }
        }
    }
    for &count in side_count.values() {
        if count != 2 {
            return Err(FibrationError::NotClosed { count });
        }
    }
    let mut comp_of_tri = vec![usize::MAX; triangles.len()];
    let mut comp_ids: HashMap<usize, usize> = HashMap::new();
    for t in 0..triangles.len() {
        let root = uf.find(t);
        let next = comp_ids.len();
        comp_of_tri[t] = *comp_ids.entry(root).or_insert(next);
    }
    let n_comp = comp_ids.len();
    let mut vertex_component = vec![usize::MAX; vertices.len()];
    let mut comp_faces = vec![0usize; n_comp];
    let mut comp_area = vec![0.0f64; n_comp];
    let mut comp_vertices: Vec<std::collections::HashSet<usize>> =
        vec![std::collections::HashSet::new(); n_comp];
    let mut comp_edges: Vec<std::collections::HashSet<(usize, usize)>> =
        vec![std::collections::HashSet::new(); n_comp];
    for (t, tri) in triangles.iter().enumerate() {
        let comp = comp_of_tri[t];
        comp_faces[comp] += 1;
        comp_area[comp] += tri_areas[t];
        for &v in tri {
            vertex_component[v] = comp;
            comp_vertices[comp].insert(v);
        }
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])] {
            comp_edges[comp].insert((a.min(b), a.max(b)));
        }
    }
    let components: Vec<Component> = (0..n_comp)
        .map(|i| Component {
            chi: comp_vertices[i].len() as i64 - comp_edges[i].len() as i64 + comp_faces[i] as i64,
            area: comp_area[i],
            triangle_count: comp_faces[i],
        })
        .collect();
    let edge_count = side_count.len();

    Ok(LevelSurface {
        theta,
        vertices,
        triangles,
        vertex_component,
        components,
        edge_count,
    })
}

/// One sampled level of a sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub chi: i64,
    pub area: f64,
    pub components: usize,
    pub chi_minus: i64,
    /// largest per-component Euler characteristic (2 flags sphere fibers)
    pub max_component_chi: i64,
    /// smallest per-component area (an upper bound for the 2-systole)
    pub min_component_area: f64,
}

/// Stratified-random theta sweep with Monte Carlo integrals over the circle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub chi_integral: f64,
    pub chi_std_error: f64,
    pub area_integral: f64,
    pub area_std_error: f64,
    pub components_integral: f64,
    pub components_std_error: f64,
    pub perturbed_levels: usize,
}

pub fn sweep(
    c: &SimplicialComplex3,
    g: &ReggeMetric,
    h: &HarmonicOneForm,
    levels: usize,
    seed: u64,
) -> Result<SweepTable, FibrationError> {
    if levels < 8 {
        return Err(FibrationError::TooFewLevels(levels));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let thetas: Vec<f64> = (0..levels)
        .map(|i| (i as f64 + rng.gen_range(0.0..1.0)) / levels as f64)
        .collect();
    let results: Vec<Result<(SweepRow, usize), FibrationError>> = thetas
        .par_iter()
        .map(|&theta0| {
            let mut theta = theta0;
            let mut perturbed = 0usize;
            for _ in 0..8 {
                match extract_level(c, g, h, theta) {
                    Ok(s) => {
                        return Ok((
                            SweepRow {
                                theta,
                                chi: s.euler_characteristic(),
                                area: s.area(),
                                components: s.component_count(),
                                chi_minus: s.chi_minus(),
                                max_component_chi: s
                                    .components()
                                    .iter()
                                    .map(|c| c.chi)
                                    .max()
                                    .unwrap_or(0),
                                min_component_area: s
                                    .components()
                                    .iter()
                                    .map(|c| c.area)
                                    .fold(f64::INFINITY, f64::min),
                            },
                            perturbed,
                        ))
                    }
                    Err(FibrationError::CriticalLevel { suggested, .. }) => {
                        perturbed = 1;
                        theta = suggested.rem_euclid(1.0);
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(FibrationError::CriticalLevel {
                theta,
                suggested: theta,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(levels);
    let mut rejected = 0usize;
    for r in results {
        match r {
            Ok((row, p)) => {
                rejected += p;
                rows.push(row);
            }
            Err(e) => return Err(e),
        }
    }
    if 10 * rejected > levels {
        return Err(FibrationError::TooManyRejected {
            rejected,
            total: levels,
        });
    }
    rows.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let mean_se = |f: &dyn Fn(&SweepRow) -> f64| -> (f64, f64) {
        let n = rows.len() as f64;
        let mean = rows.iter().map(f).sum::<f64>() / n;
        let var = rows.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    };
    let (chi_integral, chi_std_error) = mean_se(&|r| r.chi as f64);
    let (area_integral, area_std_error) = mean_se(&|r| r.area);
    let (components_integral, components_std_error) = mean_se(&|r| r.components as f64);
    Ok(SweepTable {
        rows,
        chi_integral,
        chi_std_error,
        area_integral,
        area_std_error,
        components_integral,
        components_std_error,
        perturbed_levels: rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{
        build_surface_times_circle, build_three_torus, FiberKind, HomologyClass, ModelMesh,
    };
    use crate::hodge::solve_harmonic;
    use crate::metric::ReggeMetric;
    use approx::assert_relative_eq;

    fn solved(mesh: &ModelMesh, coords: Vec<i64>) -> (ReggeMetric, HarmonicOneForm) {
        let g = ReggeMetric::from_model(mesh).unwrap();
        let omega = mesh
            .cocycle_basis
            .cocycle_for_class(&HomologyClass::surface(coords))
            .unwrap();
        let h = solve_harmonic(&mesh.complex, &g, &omega, 1e-10).unwrap();
        (g, h)
    }

    #[test]
    fn sphere_fiber_topology() {
        for (level, m) in [(0u32, 3usize), (1, 6)] {
            let mesh = build_surface_times_circle(FiberKind::Sphere { level }, m).unwrap();
            let (g, h) = solved(&mesh, vec![1]);
            let s = extract_level(&mesh.complex, &g, &h, 0.37).unwrap();
            assert_eq!(s.component_count(), 1);
            assert_eq!(s.euler_characteristic(), 2);
            assert_eq!(s.chi_minus(), 0);
        }
    }

    #[test]
    fn flat_torus_unit_fiber() {
        let mesh = build_three_torus(3).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 1]);
        let s = extract_level(&mesh.complex, &g, &h, 0.5).unwrap();
        assert_eq!(s.component_count(), 1);
        assert_eq!(s.euler_characteristic(), 0);
        assert_relative_eq!(s.area(), 1.0, epsilon = 1e-10);
        assert_eq!(s.chi_minus(), 0);
    }

    #[test]
    fn doubled_class_gives_two_fibers() {
        let mesh = build_three_torus(3).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 2]);
        let s = extract_level(&mesh.complex, &g, &h, 0.33).unwrap();
        assert_eq!(s.component_count(), 2);
        for comp in s.components() {
            assert_eq!(comp.chi, 0);
        }
        assert_relative_eq!(s.area(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn diagonal_class_fiber_area() {
        let mesh = build_three_torus(4).unwrap();
        let (g, h) = solved(&mesh, vec![1, 1, 0]);
        let s = extract_level(&mesh.complex, &g, &h, 0.41).unwrap();
        assert_eq!(s.component_count(), 1);
        assert_eq!(s.euler_characteristic(), 0);
        assert_relative_eq!(s.area(), 2.0f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn genus2_fiber_chi_minus() {
        let mesh =
            build_surface_times_circle(FiberKind::GluedGenus { genus: 2, grid: 4 }, 4).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 0, 0, 1]);
        let s = extract_level(&mesh.complex, &g, &h, 0.61).unwrap();
        assert_eq!(s.component_count(), 1);
        assert_eq!(s.euler_characteristic(), -2);
        assert_eq!(s.chi_minus(), 2);
        // per-component chi of a closed orientable surface is even
        for comp in s.components() {
            assert_eq!(comp.chi % 2, 0);
        }
    }

    #[test]
    fn fibers_pair_with_reference_cycles() {
        let mesh = build_surface_times_circle(FiberKind::Sphere { level: 0 }, 4).unwrap();
        let (g, h) = solved(&mesh, vec![1]);
        let s = extract_level(&mesh.complex, &g, &h, 0.52).unwrap();
        let circle = mesh.reference_cycles.last().unwrap();
        assert_eq!(s.component_pairing(0, circle, &h), 1);

        let mesh = build_three_torus(3).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 2]);
        let s = extract_level(&mesh.complex, &g, &h, 0.2).unwrap();
        let z_loop = &mesh.reference_cycles[2];
        let total: i64 = (0..s.component_count())
            .map(|comp| s.component_pairing(comp, z_loop, &h))
            .sum();
        assert_eq!(total, 2);
        for comp in 0..s.component_count() {
            assert_eq!(s.component_pairing(comp, z_loop, &h), 1);
        }
    }

    #[test]
    fn theta_stability_on_models() {
        let mesh = build_surface_times_circle(FiberKind::Sphere { level: 0 }, 5).unwrap();
        let (g, h) = solved(&mesh, vec![1]);
        for i in 0..50 {
            let theta = (i as f64 + 0.5) / 50.0;
            let s = extract_level(&mesh.complex, &g, &h, theta).unwrap();
            assert_eq!((s.euler_characteristic(), s.component_count()), (2, 1));
        }
    }

    #[test]
    fn critical_level_guard() {
        let mesh = build_three_torus(2).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 1]);
        // vertex phases for the unit class sit on the lattice {0, 1/2}
        match extract_level(&mesh.complex, &g, &h, 0.5) {
            Err(FibrationError::CriticalLevel { suggested, .. }) => {
                assert!(extract_level(&mesh.complex, &g, &h, suggested).is_ok());
            }
            _ => panic!("expected critical-level error at a vertex phase"),
        }
    }

    #[test]
    fn sweep_integrals_and_guards() {
        let mesh = build_three_torus(3).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 1]);
        assert!(matches!(
            sweep(&mesh.complex, &g, &h, 4, 1),
            Err(FibrationError::TooFewLevels(4))
        ));
        let table = sweep(&mesh.complex, &g, &h, 16, 42).unwrap();
        assert_eq!(table.rows.len(), 16);
        assert!(table.chi_integral.abs() <= 1e-12);
        assert_relative_eq!(table.area_integral, 1.0, epsilon = 1e-10);
        assert!(table.area_std_error <= 1e-10);
        assert!(table.rows.windows(2).all(|w| w[0].theta <= w[1].theta));
        // reproducibility: same seed, same table
        let again = sweep(&mesh.complex, &g, &h, 16, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&table).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn sweep_chi_constant_on_sphere_product() {
        let mesh = build_surface_times_circle(FiberKind::Sphere { level: 1 }, 6).unwrap();
        let (g, h) = solved(&mesh, vec![1]);
        let table = sweep(&mesh.complex, &g, &h, 12, 7).unwrap();
        assert!(table.rows.iter().all(|r| r.chi == 2 && r.components == 1));
        assert_relative_eq!(table.chi_integral, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn coarea_cross_check_on_models() {
        use crate::hodge::pointwise_speed;
        let cases: Vec<(ModelMesh, Vec<i64>)> = vec![
            (build_three_torus(4).unwrap(), vec![1, 1, 0]),
            (
                build_surface_times_circle(FiberKind::Sphere { level: 2 }, 8).unwrap(),
                vec![1],
            ),
            (
                build_surface_times_circle(FiberKind::GluedGenus { genus: 2, grid: 6 }, 6).unwrap(),
                vec![0, 0, 0, 0, 1],
            ),
        ];
        for (mesh, coords) in cases {
            let (g, h) = solved(&mesh, coords);
            let speeds = pointwise_speed(&mesh.complex, &g, &h);
            let bulk: f64 = speeds
                .iter()
                .zip(g.tet_volumes())
                .map(|(&s, &v)| s * v)
                .sum();
            let table = sweep(&mesh.complex, &g, &h, 12, 3).unwrap();
            let rel = (table.area_integral - bulk).abs() / bulk;
            assert!(rel <= 0.02, "{}: coarea mismatch {rel}", mesh.name);
        }
    }

    #[test]
    fn export_has_documented_shape() {
        let mesh = build_three_torus(3).unwrap();
        let (g, h) = solved(&mesh, vec![0, 0, 1]);
        let s = extract_level(&mesh.complex, &g, &h, 0.25).unwrap();
        let mut buf = Vec::new();
        s.export_ascii(&mesh.complex, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# hfib level surface");
        assert!(lines.next().unwrap().starts_with("# theta"));
        let vline = lines.next().unwrap();
        assert!(vline.starts_with("vertices "));
        let n: usize = vline.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert_eq!(n, s.vertices().len());
        assert!(text.contains("\ntriangles "));
    }
}
