//! Model triangulations: the periodic cube-grid 3-torus and fibered
//! products (surface x circle) built from prisms.
//!
//! Each builder returns a [`ModelMesh`]: the complex, per-tetrahedron local
//! isometric charts in R^4 (fiber plane + circle coordinate), a basis of
//! integer wall cocycles aligned so the periods on the reference cycles are
//! the identity, and the reference cycles themselves.

use super::{CocycleBasis, ComplexError, Cycle, SimplicialComplex3};
use std::collections::HashMap;

/// Which model a builder produced; downstream checks key curated data
/// (known norms, sphere-freeness) on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Torus3 {
        n: usize,
    },
    Product {
        fiber: FiberKind,
        circle_subdiv: usize,
    },
}

/// A built model manifold with its combinatorial homology data.
pub struct ModelMesh {
    pub complex: SimplicialComplex3,
    /// Per-tet corner positions in a local isometric chart; the first three
    /// components are the fiber/chart plane, the fourth the circle
    /// coordinate (zero for the 3-torus).
    pub charts: Vec<[[f64; 4]; 4]>,
    pub cocycle_basis: CocycleBasis,
    pub reference_cycles: Vec<Cycle>,
    pub kind: ModelKind,
    pub name: String,
}

impl ModelMesh {
    /// Euclidean edge lengths induced by the per-tet charts. Shared edges
    /// are measured from every incident tet; disagreement beyond 1e-9 is a
    /// construction bug.
    pub fn chart_edge_lengths(&self) -> Result<Vec<f64>, ComplexError> {
        let c = &self.complex;
        let mut lengths = vec![f64::NAN; c.edge_count()];
        for (t, te) in c.tet_edges().iter().enumerate() {
            for (slot, &(i, j)) in super::TET_EDGES.iter().enumerate() {
                let a = self.charts[t][i];
                let b = self.charts[t][j];
                let l = (0..4).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt();
                let e = te[slot];
                if lengths[e].is_nan() {
                    lengths[e] = l;
                } else if (lengths[e] - l).abs() > 1e-9 * (1.0 + l) {
                    return Err(ComplexError::InvalidBuild(format!(
                        "edge {e} has inconsistent chart lengths {} vs {l}",
                        lengths[e]
                    )));
                }
            }
        }
        if lengths.iter().any(|l| l.is_nan()) {
            return Err(ComplexError::InvalidBuild(
                "edge missing from all tets".into(),
            ));
        }
        Ok(lengths)
    }
}

/// Reorder the tetrahedron so it is positively oriented in the chart
/// hyperplane spanned by the given three axes of R^4.
fn orient_positively(
    ids: &mut [usize; 4],
    lifts: &mut [[i64; 3]; 4],
    chart: &mut [[f64; 4]; 4],
    axes: [usize; 3],
) {
    let d = |i: usize, k: usize| chart[i][axes[k]] - chart[0][axes[k]];
    let det = d(1, 0) * (d(2, 1) * d(3, 2) - d(2, 2) * d(3, 1))
        - d(1, 1) * (d(2, 0) * d(3, 2) - d(2, 2) * d(3, 0))
        + d(1, 2) * (d(2, 0) * d(3, 1) - d(2, 1) * d(3, 0));
    debug_assert!(det != 0.0, "degenerate tetrahedron in chart");
    if det < 0.0 {
        ids.swap(2, 3);
        lifts.swap(2, 3);
        chart.swap(2, 3);
    }
}

/// Periodic n x n x n cube grid, each cube split into six tetrahedra along
/// the main diagonal. Coordinates live in the unit fundamental domain.
pub fn build_three_torus(n: usize) -> Result<ModelMesh, ComplexError> {
    if n < 2 {
        return Err(ComplexError::TooCoarse { got: n, min: 2 });
    }
    let ni = n as i64;
    let vid = |q: [i64; 3]| -> usize {
        let m = |x: i64| x.rem_euclid(ni) as usize;
        m(q[0]) + n * (m(q[1]) + n * m(q[2]))
    };
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tets = Vec::with_capacity(6 * n * n * n);
    let mut lifts = Vec::with_capacity(tets.capacity());
    let mut charts = Vec::with_capacity(tets.capacity());
    for z in 0..ni {
        for y in 0..ni {
            for x in 0..ni {
                for perm in PERMS {
                    let mut q = [x, y, z];
                    let mut corner_lifts = [[0i64; 3]; 4];
                    corner_lifts[0] = q;
                    for (s, &axis) in perm.iter().enumerate() {
                        q[axis] += 1;
                        corner_lifts[s + 1] = q;
                    }
                    let mut ids = [0usize; 4];
                    let mut chart = [[0f64; 4]; 4];
                    for c in 0..4 {
                        ids[c] = vid(corner_lifts[c]);
                        for k in 0..3 {
                            chart[c][k] = corner_lifts[c][k] as f64 / n as f64;
                        }
                    }
                    orient_positively(&mut ids, &mut corner_lifts, &mut chart, [0, 1, 2]);
                    tets.push(ids);
                    lifts.push(corner_lifts);
                    charts.push(chart);
                }
            }
        }
    }
    let coords: Vec<[f64; 3]> = (0..n * n * n)
        .map(|v| {
            let (i, j, k) = (v % n, (v / n) % n, v / (n * n));
            [
                i as f64 / n as f64,
                j as f64 / n as f64,
                k as f64 / n as f64,
            ]
        })
        .collect();
    let complex = SimplicialComplex3::from_lifted_tetrahedra(n * n * n, tets, lifts, Some(coords))?;
    let report = complex.validate();
    if !report.is_valid() {
        return Err(ComplexError::InvalidBuild(report.to_string()));
    }

    // wall cocycles: signed crossing count of the coordinate walls
    let mut cocycles = vec![vec![0i64; complex.edge_count()]; 3];
    for (e, [a, _]) in complex.edges().iter().enumerate() {
        let rel = complex.edge_rel_lift()[e];
        let pos = [(a % n) as i64, ((a / n) % n) as i64, (a / (n * n)) as i64];
        for axis in 0..3 {
            cocycles[axis][e] = (pos[axis] + rel[axis]).div_euclid(ni);
        }
    }
    let mut reference_cycles = Vec::new();
    for axis in 0..3 {
        let mut edges = Vec::new();
        for i in 0..ni {
            let mut from = [0i64; 3];
            from[axis] = i;
            let mut to = from;
            to[axis] += 1;
            let mut rel = [0i64; 3];
            rel[axis] = 1;
            let (e, s) = complex
                .find_edge(vid(from), vid(to), rel)
                .ok_or_else(|| ComplexError::InvalidBuild("missing axis edge".into()))?;
            edges.push((e, s as i64));
        }
        reference_cycles.push(Cycle { edges });
    }
    let mut basis = CocycleBasis::new(&complex, cocycles)?;
    basis.align_to_cycles(&reference_cycles)?;

    Ok(ModelMesh {
        complex,
        charts,
        cocycle_basis: basis,
        reference_cycles,
        kind: ModelKind::Torus3 { n },
        name: format!("torus3-n{n}"),
    })
}

/// Fiber of a surface x circle product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    /// Icosahedral subdivision of the unit sphere (chordal edge lengths).
    Sphere { level: u32 },
    /// Unit-area flat square torus on a `grid` x `grid` mesh (grid >= 3).
    FlatTorus { grid: usize },
    /// Genus >= 2 surface: flat square tori chained by slit-triangle
    /// gluings, scaled to area 2 pi (2 genus - 2).
    GluedGenus { genus: u32, grid: usize },
}

struct FiberMesh {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    /// canonical (min,max) pair -> edge length
    edge_len: HashMap<(usize, usize), f64>,
    /// per-face corner positions consistent with `edge_len`
    face_embed: Vec<[[f64; 2]; 3]>,
    /// viewing positions (sphere point, or plane point with torus index offset)
    positions: Vec<[f64; 3]>,
    /// wall cocycles on canonical fiber edges
    walls: Vec<HashMap<(usize, usize), i64>>,
    /// closed vertex loops pairing 1:1 with `walls`
    loops: Vec<Vec<usize>>,
}

impl FiberMesh {
    fn edge(&self, a: usize, b: usize) -> f64 {
        self.edge_len[&(a.min(b), a.max(b))]
    }

    fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                heron(
                    self.edge(f[0], f[1]),
                    self.edge(f[1], f[2]),
                    self.edge(f[0], f[2]),
                )
            })
            .sum()
    }

    fn scale(&mut self, s: f64) {
        for v in self.edge_len.values_mut() {
            *v *= s;
        }
        for e in &mut self.face_embed {
            for p in e.iter_mut() {
                p[0] *= s;
                p[1] *= s;
            }
        }
    }

    fn rebuild_embeddings(&mut self) -> Result<(), ComplexError> {
        self.face_embed = self
            .faces
            .iter()
            .map(|f| {
                let (l01, l12, l02) = (
                    self.edge(f[0], f[1]),
                    self.edge(f[1], f[2]),
                    self.edge(f[0], f[2]),
                );
                embed_triangle(l01, l12, l02).ok_or(ComplexError::InvalidBuild(format!(
                    "fiber face {f:?} not realizable"
                )))
            })
            .collect::<Result<_, _>>()?;
        Ok(())
    }
}

fn heron(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
}

fn embed_triangle(l01: f64, l12: f64, l02: f64) -> Option<[[f64; 2]; 3]> {
    let x2 = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    let y2sq = l02 * l02 - x2 * x2;
    if !(y2sq > 0.0) || !(l01 > 0.0) {
        return None;
    }
    Some([[0.0, 0.0], [l01, 0.0], [x2, y2sq.sqrt()]])
}

fn icosphere(level: u32) -> FiberMesh {
    let t = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut verts: Vec<[f64; 3]> = raw
        .iter()
        .map(|p| {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            [p[0] / n, p[1] / n, p[2] / n]
        })
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    // outward (counterclockwise seen from outside) orientation
    for f in &mut faces {
        let (a, b, c) = (verts[f[0]], verts[f[1]], verts[f[2]]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let centroid = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
        if n[0] * centroid[0] + n[1] * centroid[1] + n[2] * centroid[2] < 0.0 {
            f.swap(1, 2);
        }
    }
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut m = [0usize; 3];
            for (k, (i, j)) in [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])]
                .iter()
                .enumerate()
            {
                let key = (*i.min(j), *i.max(j));
                m[k] = *mid.entry(key).or_insert_with(|| {
                    let (p, q) = (verts[key.0], verts[key.1]);
                    let s = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
                    let n = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt();
                    verts.push([s[0] / n, s[1] / n, s[2] / n]);
                    verts.len() - 1
                });
            }
            let (m01, m12, m02) = (m[0], m[1], m[2]);
            next.push([f[0], m01, m02]);
            next.push([m01, f[1], m12]);
            next.push([m02, m12, f[2]]);
            next.push([m01, m12, m02]);
        }
        faces = next;
    }
    let mut edge_len = HashMap::new();
    for f in &faces {
        for (i, j) in [(f[0], f[1]), (f[1], f[2]), (f[0], f[2])] {
            let key = (i.min(j), i.max(j));
            let (p, q) = (verts[key.0], verts[key.1]);
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
            edge_len.insert(key, d);
        }
    }
    let mut fiber = FiberMesh {
        vertex_count: verts.len(),
        faces,
        edge_len,
        face_embed: Vec::new(),
        positions: verts,
        walls: Vec::new(),
        loops: Vec::new(),
    };
    fiber
        .rebuild_embeddings()
        .expect("icosphere triangles are realizable");
    fiber
}

/// One flat unit torus on a k x k grid, local vertex ids `i + k j`.
/// Walls/loops are filled by the caller (offsets differ per use).
fn square_torus_faces(k: usize) -> Vec<[usize; 3]> {
    let vid = |i: usize, j: usize| (i % k) + k * (j % k);
    let mut faces = Vec::with_capacity(2 * k * k);
    for j in 0..k {
        for i in 0..k {
            // square split along the (i,j) -> (i+1,j+1) diagonal, CCW
            faces.push([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            faces.push([vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    faces
}

/// Wall-crossing values for one torus block: for each edge instance with
/// known integer steps, the signed number of spillovers past the periodic
/// boundary in the given axis.
fn torus_block_walls(
    k: usize,
    offset: usize,
    remap: &dyn Fn(usize) -> usize,
) -> [HashMap<(usize, usize), i64>; 2] {
    let ki = k as i64;
    let vid = |i: usize, j: usize| remap(offset + (i % k) + k * (j % k));
    let mut wx = HashMap::new();
    let mut wy = HashMap::new();
    let put = |map: &mut HashMap<(usize, usize), i64>, a: usize, b: usize, v: i64| {
        let (key, val) = if a < b { ((a, b), v) } else { ((b, a), -v) };
        map.insert(key, val);
    };
    for j in 0..k {
        for i in 0..k {
            let (ii, jj) = (i as i64, j as i64);
            // axis x
            put(&mut wx, vid(i, j), vid(i + 1, j), (ii + 1).div_euclid(ki));
            put(&mut wy, vid(i, j), vid(i + 1, j), 0);
            // axis y
            put(&mut wx, vid(i, j), vid(i, j + 1), 0);
            put(&mut wy, vid(i, j), vid(i, j + 1), (jj + 1).div_euclid(ki));
            // diagonal
            put(
                &mut wx,
                vid(i, j),
                vid(i + 1, j + 1),
                (ii + 1).div_euclid(ki),
            );
            put(
                &mut wy,
                vid(i, j),
                vid(i + 1, j + 1),
                (jj + 1).div_euclid(ki),
            );
        }
    }
    [wx, wy]
}

fn flat_torus_fiber(k: usize) -> Result<FiberMesh, ComplexError> {
    if k < 3 {
        return Err(ComplexError::TooCoarse { got: k, min: 3 });
    }
    let faces = square_torus_faces(k);
    let s = 1.0 / k as f64;
    let mut edge_len = HashMap::new();
    let vid = |i: usize, j: usize| (i % k) + k * (j % k);
    for j in 0..k {
        for i in 0..k {
            for (b, l) in [
                (vid(i + 1, j), s),
                (vid(i, j + 1), s),
                (vid(i + 1, j + 1), s * 2.0_f64.sqrt()),
            ] {
                let a = vid(i, j);
                edge_len.insert((a.min(b), a.max(b)), l);
            }
        }
    }
    let identity = |v: usize| v;
    let [wx, wy] = torus_block_walls(k, 0, &identity);
    let loop_x: Vec<usize> = (0..k).map(|i| vid(i, 0)).collect();
    let loop_y: Vec<usize> = (0..k).map(|j| vid(0, j)).collect();
    let positions = (0..k * k)
        .map(|v| [(v % k) as f64 * s, (v / k) as f64 * s, 0.0])
        .collect();
    let mut fiber = FiberMesh {
        vertex_count: k * k,
        faces,
        edge_len,
        face_embed: Vec::new(),
        positions,
        walls: vec![wx, wy],
        loops: vec![loop_x, loop_y],
    };
    fiber.rebuild_embeddings()?;
    Ok(fiber)
}

/// Genus >= 2 fiber: `genus` unit square tori chained by removing one
/// triangle from consecutive blocks and gluing the boundary triangles with
/// reversed orientation. The cone metric keeps the grid edge lengths
/// (seam conflicts resolve to the lower block's value) and is scaled to
/// total area 2 pi (2 genus - 2).
fn glued_genus_fiber(genus: u32, k: usize) -> Result<FiberMesh, ComplexError> {
    if genus < 2 {
        return Err(ComplexError::TooCoarse {
            got: genus as usize,
            min: 2,
        });
    }
    let min_k = if genus == 2 { 4 } else { 5 };
    if k < min_k {
        return Err(ComplexError::TooCoarse { got: k, min: min_k });
    }
    let g = genus as usize;
    let raw_vid = |t: usize, i: usize, j: usize| t * k * k + (i % k) + k * (j % k);
    // seam squares: "right" seam of block t at (k-2, k-2), "left" seam of
    // block t+1 at (1, 1); both interior and wall-free
    let rs = k - 2;
    let ls = 1;
    // raw -> merged id map via the three seam identifications per gluing
    let mut alias: HashMap<usize, usize> = HashMap::new();
    for t in 0..g - 1 {
        let u = [
            raw_vid(t, rs, rs),
            raw_vid(t, rs + 1, rs),
            raw_vid(t, rs + 1, rs + 1),
        ];
        let w = [
            raw_vid(t + 1, ls, ls),
            raw_vid(t + 1, ls + 1, ls),
            raw_vid(t + 1, ls + 1, ls + 1),
        ];
        // orientation-reversing boundary identification
        alias.insert(w[0], u[0]);
        alias.insert(w[1], u[2]);
        alias.insert(w[2], u[1]);
    }
    // follow alias chains (middle blocks alias into the previous block)
    let resolve = |mut v: usize, alias: &HashMap<usize, usize>| -> usize {
        while let Some(&next) = alias.get(&v) {
            v = next;
        }
        v
    };
    let mut compact: HashMap<usize, usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut remap = vec![usize::MAX; g * k * k];
    let s = 1.0 / k as f64;
    for raw in 0..g * k * k {
        let root = resolve(raw, &alias);
        let id = *compact.entry(root).or_insert_with(|| {
            let t = root / (k * k);
            let (i, j) = (root % (k * k) % k, root % (k * k) / k);
            positions.push([i as f64 * s + t as f64 * 1.25, j as f64 * s, 0.0]);
            positions.len() - 1
        });
        remap[raw] = id;
    }

    let mut faces = Vec::new();
    let mut edge_len: HashMap<(usize, usize), f64> = HashMap::new();
    for t in 0..g {
        let removed: Vec<(usize, usize)> = {
            let mut r = Vec::new();
            if t + 1 < g {
                r.push((rs, rs));
            }
            if t > 0 {
                r.push((ls, ls));
            }
            r
        };
        for j in 0..k {
            for i in 0..k {
                let a = remap[raw_vid(t, i, j)];
                let b = remap[raw_vid(t, i + 1, j)];
                let c = remap[raw_vid(t, i + 1, j + 1)];
                let d = remap[raw_vid(t, i, j + 1)];
                if !removed.contains(&(i, j)) {
                    faces.push([a, b, c]);
                }
                faces.push([a, c, d]);
                for (pair, l) in [
                    ((a.min(b), a.max(b)), s),
                    ((a.min(d), a.max(d)), s),
                    ((a.min(c), a.max(c)), s * 2.0_f64.sqrt()),
                ] {
                    edge_len.entry(pair).or_insert(l);
                }
            }
        }
    }
    let vertex_count = positions.len();
    let mut walls = Vec::new();
    let mut loops = Vec::new();
    for t in 0..g {
        let remap_ref = |v: usize| remap[v];
        let [wx, wy] = torus_block_walls(k, t * k * k, &remap_ref);
        walls.push(wx);
        walls.push(wy);
        loops.push((0..k).map(|i| remap[raw_vid(t, i, 0)]).collect());
        loops.push((0..k).map(|j| remap[raw_vid(t, 0, j)]).collect());
    }
    let mut fiber = FiberMesh {
        vertex_count,
        faces,
        edge_len,
        face_embed: Vec::new(),
        positions,
        walls,
        loops,
    };
    let target = 2.0 * std::f64::consts::PI * (2.0 * genus as f64 - 2.0);
    let scale = (target / fiber.area()).sqrt();
    fiber.scale(scale);
    fiber.rebuild_embeddings()?;
    Ok(fiber)
}

/// Product triangulation of (fiber surface) x (circle of length 1) via
/// prisms, each split into three tetrahedra with the globally sorted
/// staircase diagonal. `circle_subdiv` is the number of circle segments.
pub fn build_surface_times_circle(
    fiber_kind: FiberKind,
    circle_subdiv: usize,
) -> Result<ModelMesh, ComplexError> {
    if circle_subdiv < 3 {
        return Err(ComplexError::TooCoarse {
            got: circle_subdiv,
            min: 3,
        });
    }
    let fiber = match fiber_kind {
        FiberKind::Sphere { level } => icosphere(level),
        FiberKind::FlatTorus { grid } => flat_torus_fiber(grid)?,
        FiberKind::GluedGenus { genus, grid } => glued_genus_fiber(genus, grid)?,
    };
    let m = circle_subdiv;
    let vf = fiber.vertex_count;
    let circle_len = 1.0;
    let dt = circle_len / m as f64;

    let mut tets = Vec::with_capacity(3 * m * fiber.faces.len());
    let mut lifts = Vec::with_capacity(tets.capacity());
    let mut charts = Vec::with_capacity(tets.capacity());
    for (f, face) in fiber.faces.iter().enumerate() {
        // positions by fiber vertex id within this face's chart
        let embed: HashMap<usize, [f64; 2]> = face
            .iter()
            .zip(fiber.face_embed[f].iter())
            .map(|(&v, &p)| (v, p))
            .collect();
        let mut sorted = *face;
        sorted.sort_unstable();
        let [a, b, c] = sorted;
        for r in 0..m {
            let rid = |v: usize, up: bool| v + ((r + up as usize) % m) * vf;
            let rlift = |up: bool| [0i64, 0, (r + up as usize) as i64];
            let corner = |v: usize, up: bool| {
                let p = embed[&v];
                (
                    rid(v, up),
                    rlift(up),
                    [p[0], p[1], 0.0, (r + up as usize) as f64 * dt],
                )
            };
            let staircase = [
                [
                    corner(a, false),
                    corner(b, false),
                    corner(c, false),
                    corner(c, true),
                ],
                [
                    corner(a, false),
                    corner(b, false),
                    corner(b, true),
                    corner(c, true),
                ],
                [
                    corner(a, false),
                    corner(a, true),
                    corner(b, true),
                    corner(c, true),
                ],
            ];
            for tet in staircase {
                let mut ids = [tet[0].0, tet[1].0, tet[2].0, tet[3].0];
                let mut lf = [tet[0].1, tet[1].1, tet[2].1, tet[3].1];
                let mut ch = [tet[0].2, tet[1].2, tet[2].2, tet[3].2];
                orient_positively(&mut ids, &mut lf, &mut ch, [0, 1, 3]);
                tets.push(ids);
                lifts.push(lf);
                charts.push(ch);
            }
        }
    }
    let coords: Vec<[f64; 3]> = (0..vf * m)
        .map(|id| {
            let (v, r) = (id % vf, id / vf);
            let p = fiber.positions[v];
            match fiber_kind {
                FiberKind::Sphere { .. } => p,
                _ => [p[0], p[1], r as f64 * dt],
            }
        })
        .collect();
    let complex = SimplicialComplex3::from_lifted_tetrahedra(vf * m, tets, lifts, Some(coords))?;
    let report = complex.validate();
    if !report.is_valid() {
        return Err(ComplexError::InvalidBuild(report.to_string()));
    }

    // cocycles: fiber walls pulled back through the projection, then the
    // circle wall
    let mut cocycles = Vec::new();
    for wall in &fiber.walls {
        let mut w = vec![0i64; complex.edge_count()];
        for (e, [tail, head]) in complex.edges().iter().enumerate() {
            let (tf, hf) = (tail % vf, head % vf);
            if tf == hf {
                continue;
            }
            let v = wall.get(&(tf.min(hf), tf.max(hf))).copied().unwrap_or(0);
            w[e] = if tf < hf { v } else { -v };
        }
        cocycles.push(w);
    }
    let mi = m as i64;
    let mut circle = vec![0i64; complex.edge_count()];
    for (e, [tail, _]) in complex.edges().iter().enumerate() {
        let ring = (tail / vf) as i64;
        let dz = complex.edge_rel_lift()[e][2];
        circle[e] = (ring + dz).div_euclid(mi);
    }
    cocycles.push(circle);

    let mut reference_cycles = Vec::new();
    for lp in &fiber.loops {
        let mut edges = Vec::new();
        for w in 0..lp.len() {
            let (u, v) = (lp[w], lp[(w + 1) % lp.len()]);
            let (e, s) = complex
                .find_edge(u, v, [0, 0, 0])
                .ok_or_else(|| ComplexError::InvalidBuild("missing fiber loop edge".into()))?;
            edges.push((e, s as i64));
        }
        reference_cycles.push(Cycle { edges });
    }
    {
        let mut edges = Vec::new();
        for r in 0..m {
            let (u, v) = (r * vf, ((r + 1) % m) * vf);
            let (e, s) = complex
                .find_edge(u, v, [0, 0, 1])
                .ok_or_else(|| ComplexError::InvalidBuild("missing circle edge".into()))?;
            edges.push((e, s as i64));
        }
        reference_cycles.push(Cycle { edges });
    }

    let mut basis = CocycleBasis::new(&complex, cocycles)?;
    basis.align_to_cycles(&reference_cycles)?;

    let name = match fiber_kind {
        FiberKind::Sphere { level } => format!("sphere-l{level}-x-circle-m{m}"),
        FiberKind::FlatTorus { grid } => format!("torus-k{grid}-x-circle-m{m}"),
        FiberKind::GluedGenus { genus, grid } => {
            format!("genus{genus}-k{grid}-x-circle-m{m}")
        }
    };
    Ok(ModelMesh {
        complex,
        charts,
        cocycle_basis: basis,
        reference_cycles,
        kind: ModelKind::Product {
            fiber: fiber_kind,
            circle_subdiv: m,
        },
        name,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{integral_cocycle_basis, integral_cycle_basis, HomologyClass};

    #[test]
    fn torus_counts_n2() {
        let mesh = build_three_torus(2).unwrap();
        let c = &mesh.complex;
        assert_eq!(c.vertex_count(), 8);
        assert_eq!(c.edge_count(), 56);
        assert_eq!(c.face_count(), 96);
        assert_eq!(c.tet_count(), 48);
        assert_eq!(
            c.vertex_count() as i64 - c.edge_count() as i64 + c.face_count() as i64
                - c.tet_count() as i64,
            0
        );
        assert!(c.validate().is_valid(), "{}", c.validate());
        assert!(!c.is_vertex_faithful());
    }

    #[test]
    fn torus_rejects_n1() {
        assert!(matches!(
            build_three_torus(1),
            Err(ComplexError::TooCoarse { .. })
        ));
    }

    #[test]
    fn torus_valid_n3_n4() {
        for n in [3, 4] {
            let mesh = build_three_torus(n).unwrap();
            let report = mesh.complex.validate();
            assert!(report.is_valid(), "n={n}: {report}");
            let chi = mesh.complex.vertex_count() as i64 - mesh.complex.edge_count() as i64
                + mesh.complex.face_count() as i64
                - mesh.complex.tet_count() as i64;
            assert_eq!(chi, 0);
        }
    }

    #[test]
    fn torus_betti_and_basis_alignment() {
        let mesh = build_three_torus(2).unwrap();
        assert_eq!(mesh.complex.betti_numbers(), (1, 3, 3, 1));
        let p = mesh.cocycle_basis.period_matrix(&mesh.reference_cycles);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    p[i][j],
                    (i == j) as i64,
                    "period matrix not identity: {p:?}"
                );
            }
        }
    }

    #[test]
    fn torus_snf_basis_matches_walls() {
        // generic SNF basis on the small instance pairs unimodularly with
        // the cycles, like the builder-attached wall basis
        let mesh = build_three_torus(2).unwrap();
        let snf_basis = integral_cocycle_basis(&mesh.complex).unwrap();
        assert_eq!(snf_basis.rank(), 3);
        let p = snf_basis.period_matrix(&mesh.reference_cycles);
        let det = super::super::int_det(&p);
        assert_eq!(det.abs(), 1, "pairing {p:?}");
    }

    #[test]
    fn cycle_basis_pairs_unimodularly() {
        let mesh = build_three_torus(2).unwrap();
        let cycles = integral_cycle_basis(&mesh.complex).unwrap();
        assert_eq!(cycles.len(), 3);
        let p = mesh.cocycle_basis.period_matrix(&cycles);
        let det = super::super::int_det(&p);
        assert_eq!(det.abs(), 1);
    }

    #[test]
    fn sphere_product_counts() {
        let mesh = build_surface_times_circle(FiberKind::Sphere { level: 0 }, 3).unwrap();
        let c = &mesh.complex;
        assert_eq!(c.vertex_count(), 36);
        assert_eq!(c.tet_count(), 180);
        assert!(c.validate().is_valid(), "{}", c.validate());
        assert_eq!(c.betti_numbers(), (1, 1, 1, 1));
        assert_eq!(mesh.cocycle_basis.rank(), 1);
        let p = mesh.cocycle_basis.period_matrix(&mesh.reference_cycles);
        assert_eq!(p, vec![vec![1]]);
    }

    #[test]
    fn product_rejects_m2() {
        assert!(build_surface_times_circle(FiberKind::Sphere { level: 0 }, 2).is_err());
    }

    #[test]
    fn torus_product_matches_torus_homology() {
        let mesh = build_surface_times_circle(FiberKind::FlatTorus { grid: 3 }, 3).unwrap();
        assert!(
            mesh.complex.validate().is_valid(),
            "{}",
            mesh.complex.validate()
        );
        assert_eq!(mesh.complex.betti_numbers(), (1, 3, 3, 1));
    }

    #[test]
    fn genus2_product_betti() {
        let mesh =
            build_surface_times_circle(FiberKind::GluedGenus { genus: 2, grid: 4 }, 3).unwrap();
        assert!(
            mesh.complex.validate().is_valid(),
            "{}",
            mesh.complex.validate()
        );
        assert_eq!(mesh.complex.betti_numbers(), (1, 5, 5, 1));
        let p = mesh.cocycle_basis.period_matrix(&mesh.reference_cycles);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(p[i][j], (i == j) as i64, "period matrix {p:?}");
            }
        }
    }

    #[test]
    fn genus2_fiber_area_normalized() {
        let fiber = glued_genus_fiber(2, 6).unwrap();
        let target = 4.0 * std::f64::consts::PI;
        assert!((fiber.area() - target).abs() < 1e-10 * target);
    }

    #[test]
    fn betti_duality_across_models() {
        for mesh in [
            build_three_torus(2).unwrap(),
            build_surface_times_circle(FiberKind::Sphere { level: 0 }, 3).unwrap(),
        ] {
            let (b0, b1, b2, b3) = mesh.complex.betti_numbers();
            assert_eq!(b0, 1);
            assert_eq!(b3, 1);
            assert_eq!(b1, b2);
        }
    }

    #[test]
    fn validate_detects_missing_and_flipped_tets() {
        let mesh = build_three_torus(2).unwrap();
        let mut tets = mesh.complex.tetrahedra().to_vec();
        let lifts = mesh.complex.tet_lifts().to_vec();
        tets.pop();
        let mut shorter_lifts = lifts.clone();
        shorter_lifts.pop();
        let broken =
            SimplicialComplex3::from_lifted_tetrahedra(8, tets, shorter_lifts, None).unwrap();
        let report = broken.validate();
        let closed_violations = report
            .violations
            .iter()
            .filter(|v| matches!(v, super::super::Violation::FaceNotClosed { .. }))
            .count();
        assert_eq!(closed_violations, 4);

        let mut tets = mesh.complex.tetrahedra().to_vec();
        let mut flipped_lifts = lifts;
        tets[0].swap(0, 1);
        flipped_lifts[0].swap(0, 1);
        let flipped =
            SimplicialComplex3::from_lifted_tetrahedra(8, tets, flipped_lifts, None).unwrap();
        let report = flipped.validate();
        let orient_violations = report
            .violations
            .iter()
            .filter(|v| matches!(v, super::super::Violation::OrientationClash { .. }))
            .count();
        assert_eq!(orient_violations, 4);
    }

    #[test]
    fn cocycles_are_closed_and_class_arithmetic_works() {
        let mesh = build_three_torus(3).unwrap();
        let basis = &mesh.cocycle_basis;
        let z = basis
            .cocycle_for_class(&HomologyClass::surface(vec![0, 0, 1]))
            .unwrap();
        for (j, cyc) in mesh.reference_cycles.iter().enumerate() {
            assert_eq!(cyc.period_of(&z), (j == 2) as i64);
        }
        let mix = basis
            .cocycle_for_class(&HomologyClass::surface(vec![1, 1, 0]))
            .unwrap();
        assert!(mesh
            .complex
            .coboundary_on_faces_int(&mix)
            .iter()
            .all(|&v| v == 0));
        assert!(matches!(
            basis.cocycle_for_class(&HomologyClass::surface(vec![0, 0, 0])),
            Err(ComplexError::ZeroClass)
        ));
    }

    #[test]
    fn simply_connected_complex_has_empty_basis() {
        // boundary of the 4-simplex: the 3-sphere on 5 vertices
        let mut tets = Vec::new();
        for omit in 0..5usize {
            let mut t: Vec<usize> = (0..5).filter(|&v| v != omit).collect();
            if omit % 2 == 1 {
                t.swap(0, 1);
            }
            tets.push([t[0], t[1], t[2], t[3]]);
        }
        let c = SimplicialComplex3::from_tetrahedra(5, tets).unwrap();
        assert!(c.validate().is_valid(), "{}", c.validate());
        assert_eq!(c.betti_numbers(), (1, 0, 0, 1));
        let basis = integral_cocycle_basis(&c).unwrap();
        assert_eq!(basis.rank(), 0);
    }

    #[test]
    fn vertex_faithfulness_by_size() {
        assert!(!build_three_torus(2).unwrap().complex.is_vertex_faithful());
        assert!(build_three_torus(3).unwrap().complex.is_vertex_faithful());
        assert!(
            build_surface_times_circle(FiberKind::Sphere { level: 0 }, 3)
                .unwrap()
                .complex
                .is_vertex_faithful()
        );
    }

    #[test]
    fn chart_lengths_are_consistent() {
        for mesh in [
            build_three_torus(2).unwrap(),
            build_surface_times_circle(FiberKind::Sphere { level: 0 }, 4).unwrap(),
            build_surface_times_circle(FiberKind::GluedGenus { genus: 2, grid: 4 }, 3).unwrap(),
        ] {
            let lengths = mesh.chart_edge_lengths().unwrap();
            assert!(lengths.iter().all(|&l| l > 0.0));
        }
    }

    #[test]
    fn boundary_compositions_vanish() {
        let mesh = build_three_torus(2).unwrap();
        let c = &mesh.complex;
        let d1 = c.boundary_1();
        let d2 = c.boundary_2();
        let d3 = c.boundary_3();
        assert!(d1.checked_mul(&d2).unwrap().is_zero());
        assert!(d2.checked_mul(&d3).unwrap().is_zero());
    }
}
