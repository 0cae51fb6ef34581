//! The named verification checks, over discrete mesh targets and analytic
//! model targets, plus their construction from config files.

use super::{Config, VerificationReport, VerifyError};
use crate::analytic::{FiberGeometry, KmFamilySpec, WarpProfile, WarpedProductModel};
use crate::complex::{
    build_surface_times_circle, build_three_torus, integral_cocycle_basis, CocycleBasis, FiberKind,
    HomologyClass, ModelKind, ModelMesh, SimplicialComplex3,
};
use crate::fibration::{sweep, SweepTable};
use crate::geom::{cross, dot, norm, normalize, scale, sub, KahanSum, Vec3};
use crate::hodge::{gradient_vectors, pointwise_speed, solve_harmonic, HarmonicOneForm};
use crate::metric::{deficit_angles, scalar_stats, CurvatureField, ReggeMetric, ScalarStats};
use std::time::Instant;

const EQUALITY_TOL: f64 = 1e-8;

/// Tolerances and sweep knobs shared by the checks.
#[derive(Debug, Clone)]
pub struct CheckSettings {
    /// relative tolerance for discrete inequalities
    pub tol_discrete: f64,
    /// absolute tolerance for analytic quadrature
    pub quad_tol: f64,
    /// relative residual for the harmonic solver
    pub solver_tol: f64,
    pub sweep_levels: usize,
    pub seed: u64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            tol_discrete: 0.05,
            quad_tol: crate::analytic::DEFAULT_QUAD_TOL,
            solver_tol: 1e-10,
            sweep_levels: 16,
            seed: 0,
        }
    }
}

impl CheckSettings {
    pub fn from_config(cfg: &Config) -> Result<Self, VerifyError> {
        let mut s = Self::default();
        if let Some(t) = cfg.get_f64("check", "tol")? {
            s.tol_discrete = t;
        }
        if let Some(t) = cfg.get_f64("check", "quad_tol")? {
            s.quad_tol = t;
        }
        if let Some(t) = cfg.get_f64("check", "solver_tol")? {
            s.solver_tol = t;
        }
        if let Some(l) = cfg.get_usize("sweep", "levels")? {
            s.sweep_levels = l;
        }
        if let Some(seed) = cfg.get_u64("sweep", "seed")? {
            s.seed = seed;
        }
        Ok(s)
    }
}

/// Curated norms of the model manifolds (known-model input, never
/// computed): every class of a torus or sphere product has norm zero; the
/// k-fold fiber class of a genus-g product has norm `|k| (2g - 2)`. Mixed
/// classes of higher-genus products are not tabulated.
pub fn known_thurston_norm(kind: ModelKind, class: &HomologyClass) -> Option<f64> {
    match kind {
        ModelKind::Torus3 { .. } => Some(0.0),
        ModelKind::Product { fiber, .. } => match fiber {
            FiberKind::Sphere { .. } | FiberKind::FlatTorus { .. } => Some(0.0),
            FiberKind::GluedGenus { genus, .. } => {
                let (base, fiber_mult) = class.coords().split_at(class.coords().len() - 1);
                if base.iter().all(|&c| c == 0) {
                    Some(fiber_mult[0].unsigned_abs() as f64 * (2.0 * genus as f64 - 2.0))
                } else {
                    None
                }
            }
        },
    }
}

/// Whether a model manifold is known to carry no nonseparating spheres.
pub fn known_sphere_free(kind: ModelKind) -> bool {
    !matches!(
        kind,
        ModelKind::Product {
            fiber: FiberKind::Sphere { .. },
            ..
        }
    )
}

/// A discrete target: mesh, metric, cocycle basis, and the class to check.
pub struct MeshTarget {
    pub complex: SimplicialComplex3,
    pub basis: CocycleBasis,
    pub metric: ReggeMetric,
    pub class: HomologyClass,
    /// curated Thurston norm for known model manifolds
    pub reference_thurston: Option<f64>,
    /// the manifold carries no nonseparating spheres
    pub sphere_free: bool,
    pub name: String,
}

impl MeshTarget {
    /// Target over a builder mesh; the reference norm and sphere-freeness
    /// come from the curated model table.
    pub fn from_model_mesh(mesh: ModelMesh, metric: ReggeMetric, class: HomologyClass) -> Self {
        let reference_thurston = known_thurston_norm(mesh.kind, &class);
        let sphere_free = known_sphere_free(mesh.kind);
        Self {
            complex: mesh.complex,
            basis: mesh.cocycle_basis,
            metric,
            class,
            reference_thurston,
            sphere_free,
            name: mesh.name,
        }
    }

    fn solve(&self, settings: &CheckSettings) -> Result<HarmonicOneForm, VerifyError> {
        let omega = self.basis.cocycle_for_class(&self.class)?;
        Ok(solve_harmonic(
            &self.complex,
            &self.metric,
            &omega,
            settings.solver_tol,
        )?)
    }
}

/// An analytic warped-product target.
pub struct ModelTarget {
    pub model: WarpedProductModel,
    pub reference_thurston: Option<f64>,
}

/// Build one of the model meshes named by `[manifold]` with the metric
/// named by `[metric]` (the `build` command and mesh targets share this).
pub fn builder_mesh_from_config(cfg: &Config) -> Result<(ModelMesh, ReggeMetric), VerifyError> {
    let kind = cfg.require("manifold", "kind")?;
    let metric_kind = cfg.get("metric", "kind").unwrap_or("model");
    match kind {
        "torus3" => {
            let n = cfg.get_usize("manifold", "n")?.unwrap_or(3);
            let mesh = build_three_torus(n)?;
            let metric = match metric_kind {
                "model" => ReggeMetric::from_model(&mesh)?,
                "conformal" => {
                    let amp = cfg.get_f64("metric", "amplitude")?.unwrap_or(0.05);
                    let phi = move |p: [f64; 3]| {
                        let w = 2.0 * std::f64::consts::PI;
                        amp * (w * p[0]).sin() * (w * p[1]).sin() * (w * p[2]).sin()
                    };
                    ReggeMetric::from_chart_metric(&mesh, move |p| {
                        let s = (2.0 * phi(p)).exp();
                        [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]]
                    })?
                }
                other => {
                    return Err(VerifyError::Precondition(format!(
                        "metric kind {other:?} not available for torus3"
                    )))
                }
            };
            Ok((mesh, metric))
        }
        "product" => {
            let fiber = match cfg.require("manifold", "fiber")? {
                "sphere" => FiberKind::Sphere {
                    level: cfg.get_usize("manifold", "fiber_level")?.unwrap_or(1) as u32,
                },
                "torus" => FiberKind::FlatTorus {
                    grid: cfg.get_usize("manifold", "grid")?.unwrap_or(4),
                },
                "genus" => FiberKind::GluedGenus {
                    genus: cfg.get_usize("manifold", "genus")?.unwrap_or(2) as u32,
                    grid: cfg.get_usize("manifold", "grid")?.unwrap_or(4),
                },
                other => {
                    return Err(VerifyError::Precondition(format!(
                        "unknown fiber {other:?}"
                    )))
                }
            };
            let m = cfg.get_usize("manifold", "circle_subdiv")?.unwrap_or(6);
            let mesh = build_surface_times_circle(fiber, m)?;
            if metric_kind != "model" {
                return Err(VerifyError::Precondition(format!(
                    "metric kind {metric_kind:?} not available for products"
                )));
            }
            let metric = ReggeMetric::from_model(&mesh)?;
            Ok((mesh, metric))
        }
        other => Err(VerifyError::Precondition(format!(
            "unknown manifold kind {other:?}"
        ))),
    }
}

pub fn mesh_target_from_config(cfg: &Config) -> Result<MeshTarget, VerifyError> {
    let kind = cfg.require("manifold", "kind")?;
    let coords = cfg
        .get_i64_list("class", "coords")?
        .ok_or(super::ConfigError::Missing {
            section: "class".into(),
            key: "coords".into(),
        })?;
    let class = HomologyClass::surface(coords);

    let mut target = match kind {
        "torus3" | "product" => {
            let (mesh, metric) = builder_mesh_from_config(cfg)?;
            MeshTarget::from_model_mesh(mesh, metric, class)
        }
        "file" => {
            let path = cfg.require("manifold", "path")?;
            let contents = super::read_m3t(std::path::Path::new(path))?;
            let report = contents.complex.validate();
            if !report.is_valid() {
                return Err(VerifyError::Precondition(format!(
                    "mesh from {path} is invalid: {report}"
                )));
            }
            let lengths = match contents.lengths {
                Some(l) => l,
                None => match contents.complex.coords() {
                    Some(coords) => contents
                        .complex
                        .edges()
                        .iter()
                        .map(|[a, b]| norm(sub(coords[*b], coords[*a])))
                        .collect(),
                    None => {
                        return Err(VerifyError::Precondition(
                            "mesh file has neither lengths nor coordinates".into(),
                        ))
                    }
                },
            };
            let metric = ReggeMetric::from_lengths(&contents.complex, lengths)?;
            let basis = integral_cocycle_basis(&contents.complex)?;
            MeshTarget {
                complex: contents.complex,
                basis,
                metric,
                class,
                reference_thurston: None,
                sphere_free: false,
                name: format!("file:{path}"),
            }
        }
        other => {
            return Err(VerifyError::Precondition(format!(
                "unknown manifold kind {other:?}"
            )))
        }
    };
    // explicit config values override the curated model table
    if let Some(reference) = cfg.get_f64("check", "reference_thurston")? {
        target.reference_thurston = Some(reference);
    }
    if let Some(sphere_free) = cfg.get_bool("check", "sphere_free")? {
        target.sphere_free = sphere_free;
    }
    Ok(target)
}

pub fn model_target_from_config(cfg: &Config) -> Result<ModelTarget, VerifyError> {
    let fiber = match cfg.require("metric", "fiber")? {
        "sphere" => FiberGeometry::Sphere,
        "torus" => FiberGeometry::FlatTorus {
            area: cfg.get_f64("metric", "torus_area")?.unwrap_or(1.0),
        },
        "hyperbolic" => FiberGeometry::Hyperbolic {
            genus: cfg.get_usize("metric", "genus")?.unwrap_or(2) as u32,
        },
        other => {
            return Err(VerifyError::Precondition(format!(
                "unknown fiber {other:?}"
            )))
        }
    };
    let length = cfg.get_f64("metric", "circle_length")?.unwrap_or(1.0);
    let profile = match cfg.get("metric", "warp").unwrap_or("const") {
        "const" => WarpProfile::constant(cfg.get_f64("metric", "warp_base")?.unwrap_or(1.0)),
        "sin" => WarpProfile::sinusoid(
            cfg.get_f64("metric", "warp_base")?.unwrap_or(1.0),
            cfg.get_f64("metric", "warp_amplitude")?.unwrap_or(0.0),
            length,
        ),
        other => return Err(VerifyError::Precondition(format!("unknown warp {other:?}"))),
    };
    Ok(ModelTarget {
        model: WarpedProductModel::new(fiber, length, profile)?,
        reference_thurston: cfg.get_f64("check", "reference_thurston")?,
    })
}

/// Grid of metric-family parameters for the convergence check.
pub struct KmGrid {
    pub thurston_norm: u32,
    pub torus_components: u32,
    pub c_delta: f64,
    pub r_values: Vec<f64>,
    pub delta_values: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct KmRow {
    pub r: f64,
    pub delta: f64,
    pub curvature_l2_sq: f64,
    pub energy_upper: f64,
    pub product_bound: f64,
}

impl KmGrid {
    pub fn from_config(cfg: &Config) -> Result<Self, VerifyError> {
        Ok(Self {
            thurston_norm: cfg.get_usize("check", "km_thurston")?.unwrap_or(2) as u32,
            torus_components: cfg.get_usize("check", "km_p")?.unwrap_or(0) as u32,
            c_delta: cfg.get_f64("check", "km_cdelta")?.unwrap_or(100.0),
            r_values: cfg
                .get_f64_list("check", "km_r")?
                .unwrap_or_else(|| vec![1e2, 1e3, 1e4]),
            delta_values: cfg
                .get_f64_list("check", "km_delta")?
                .unwrap_or_else(|| vec![0.01]),
        })
    }

    pub fn rows(&self) -> Result<Vec<KmRow>, VerifyError> {
        let mut rows = Vec::new();
        for &delta in &self.delta_values {
            for &r in &self.r_values {
                let eval = KmFamilySpec {
                    thurston_norm: self.thurston_norm,
                    torus_components: self.torus_components,
                    torus_area: delta,
                    neck_length: r,
                    c_delta: self.c_delta,
                }
                .evaluate()?;
                rows.push(KmRow {
                    r,
                    delta,
                    curvature_l2_sq: eval.curvature_l2_sq,
                    energy_upper: eval.energy_upper,
                    product_bound: eval.product_bound,
                });
            }
        }
        Ok(rows)
    }
}

/// Discrete rigidity diagnostic: RMS jump of the lift gradient across
/// interior faces, isometrically unfolded, relative to the mean speed.
/// Vanishes exactly when the gradient field is globally parallel.
pub fn hessian_surrogate(c: &SimplicialComplex3, g: &ReggeMetric, h: &HarmonicOneForm) -> f64 {
    let grads = gradient_vectors(c, g, h);
    let speeds = pointwise_speed(c, g, h);
    let mut mean_speed = KahanSum::new();
    let mut vol = KahanSum::new();
    for (s, v) in speeds.iter().zip(g.tet_volumes()) {
        mean_speed.add(s * v);
        vol.add(*v);
    }
    let mean_speed = mean_speed.value() / vol.value();
    if mean_speed <= 1e-30 {
        return 0.0;
    }

    let frame_of = |p: &[Vec3; 3]| -> [Vec3; 3] {
        let u1 = normalize(sub(p[1], p[0]));
        let w = sub(p[2], p[0]);
        let u2 = normalize(sub(w, scale(u1, dot(w, u1))));
        [u1, u2, cross(u1, u2)]
    };
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for (f, inc) in c.face_tets().iter().enumerate() {
        if inc.len() != 2 {
            continue;
        }
        let ids = c.faces()[f];
        let (t1, t2) = (inc[0].0, inc[1].0);
        let corner_pos = |t: usize| -> [Vec3; 3] {
            let tet = c.tetrahedra()[t];
            std::array::from_fn(|k| {
                let local = tet
                    .iter()
                    .position(|&v| v == ids[k])
                    .expect("face corner in tet");
                g.tet_corners()[t][local]
            })
        };
        let p = corner_pos(t1);
        let q = corner_pos(t2);
        let fp = frame_of(&p);
        let fq = frame_of(&q);
        // rotation mapping t2's face frame onto t1's
        let rot = |v: Vec3| -> Vec3 {
            let coeff = [dot(v, fq[0]), dot(v, fq[1]), dot(v, fq[2])];
            [
                coeff[0] * fp[0][0] + coeff[1] * fp[1][0] + coeff[2] * fp[2][0],
                coeff[0] * fp[0][1] + coeff[1] * fp[1][1] + coeff[2] * fp[2][1],
                coeff[0] * fp[0][2] + coeff[1] * fp[1][2] + coeff[2] * fp[2][2],
            ]
        };
        let jump = sub(grads[t1], rot(grads[t2]));
        let area = 0.5 * norm(cross(sub(p[1], p[0]), sub(p[2], p[0])));
        num.add(area * dot(jump, jump));
        den.add(area);
    }
    (num.value() / den.value()).max(0.0).sqrt() / mean_speed
}

fn curvature_spread(field: &CurvatureField) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &r in field.lumped_r() {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    hi - lo
}

struct SolvedMesh {
    h: HarmonicOneForm,
    field: CurvatureField,
    stats: ScalarStats,
    table: SweepTable,
}

fn solve_and_sweep(
    target: &MeshTarget,
    settings: &CheckSettings,
) -> Result<SolvedMesh, VerifyError> {
    let h = target.solve(settings)?;
    let field = deficit_angles(&target.complex, &target.metric);
    let stats = scalar_stats(&field, &target.metric);
    let table = sweep(
        &target.complex,
        &target.metric,
        &h,
        settings.sweep_levels,
        settings.seed,
    )?;
    Ok(SolvedMesh {
        h,
        field,
        stats,
        table,
    })
}

/// The level-set inequality on a mesh, weakened by dropping the
/// (nonnegative) Hessian term: `2 pi int chi >= 1/2 sum_e R_e |du|_e V_e`.
pub fn check_main_inequality_discrete(
    target: &MeshTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("main-inequality", digest);
    let solved = solve_and_sweep(target, settings)?;
    let c = &target.complex;

    let speeds = pointwise_speed(c, &target.metric, &solved.h);
    // per-edge speed averaged over incident tets
    let mut edge_speed = vec![0.0f64; c.edge_count()];
    let mut edge_count = vec![0usize; c.edge_count()];
    for (t, te) in c.tet_edges().iter().enumerate() {
        for &e in te {
            edge_speed[e] += speeds[t];
            edge_count[e] += 1;
        }
    }
    let mut rhs = KahanSum::new();
    for (e, &r) in solved.field.lumped_r().iter().enumerate() {
        let s = edge_speed[e] / edge_count[e].max(1) as f64;
        rhs.add(0.5 * r * s * target.metric.edge_dual_volume()[e]);
    }
    let rhs = rhs.value();
    let lhs = 2.0 * std::f64::consts::PI * solved.table.chi_integral;
    let scale = lhs.abs().max(rhs.abs()).max(1.0);

    report.put("lhs", lhs, "1");
    report.put("rhs", rhs, "1");
    report.put("slack", lhs - rhs, "1");
    report.put("chi_integral", solved.table.chi_integral, "1");
    report.put("chi_std_error", solved.table.chi_std_error, "1");
    report.put("area_integral", solved.table.area_integral, "length^2");
    report.put("harmonic_norm", solved.h.norm(), "length^(1/2)");
    report.put("min_r", solved.stats.min_r, "length^-2");
    report.put("total_curvature", solved.stats.total_curvature, "length");
    report.put(
        "hessian_surrogate",
        hessian_surrogate(c, &target.metric, &solved.h),
        "length^-1",
    );
    report.tolerance("tol_discrete", settings.tol_discrete);
    report.require("lhs_ge_rhs", lhs >= rhs - settings.tol_discrete * scale);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Exact-equality check of the level-set identity on a submersion model.
pub fn check_main_identity_analytic(
    target: &ModelTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("main-identity", digest);
    let sides = target.model.main_identity_sides(settings.quad_tol)?;
    report.put("lhs", sides.lhs, "1");
    report.put("rhs", sides.rhs, "1");
    report.put("hessian_term", sides.hessian_term, "1");
    report.put("curvature_term", sides.curvature_term, "1");
    report.tolerance("equality_rel", EQUALITY_TOL);
    let scale = sides.lhs.abs().max(1e-2);
    report.require(
        "hessian_term_nonnegative",
        sides.hessian_term >= -EQUALITY_TOL,
    );
    report.require(
        "equality",
        (sides.lhs - sides.rhs).abs() <= EQUALITY_TOL * scale,
    );
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// The norm inequality `||alpha||_Th <= (1/4pi) ||alpha||_H ||R^-||_L2`
/// against a curated reference norm, with the fiber bound
/// `||alpha||_Th <= chi_minus(fiber)` checked per sampled level.
pub fn check_thurston_bound_mesh(
    target: &MeshTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("thurston-bound", digest);
    let solved = solve_and_sweep(target, settings)?;

    let bound = solved.h.norm() * solved.stats.neg_l2 / (4.0 * std::f64::consts::PI);
    let chi_minus_min = solved
        .table
        .rows
        .iter()
        .map(|r| r.chi_minus)
        .min()
        .unwrap_or(0);
    let sphere_detected = solved.table.rows.iter().any(|r| r.max_component_chi > 0);

    report.put("harmonic_norm", solved.h.norm(), "length^(1/2)");
    report.put("curvature_l2", solved.stats.neg_l2, "length^(-1/2)");
    report.put("bound", bound, "1");
    report.put("chi_minus_min", chi_minus_min as f64, "1");
    report.put(
        "sphere_fibers_detected",
        sphere_detected as i64 as f64,
        "bool",
    );
    report.put(
        "hessian_surrogate",
        hessian_surrogate(&target.complex, &target.metric, &solved.h),
        "length^-1",
    );
    report.put(
        "curvature_spread",
        curvature_spread(&solved.field),
        "length^-2",
    );
    report.tolerance("tol_discrete", settings.tol_discrete);

    if sphere_detected {
        report.note(
            "sphere fibers detected: the manifold carries nonseparating spheres and the \
             norm inequality's hypothesis fails",
        );
        if target.sphere_free {
            report.require("declared_sphere_free_consistent", false);
        }
    } else if let Some(reference) = target.reference_thurston {
        let tol = settings.tol_discrete * reference.abs().max(1.0);
        report.put("reference_thurston", reference, "1");
        report.require("reference_le_bound", reference <= bound + tol);
        report.require(
            "reference_le_chi_minus",
            reference <= chi_minus_min as f64 + 1e-9,
        );
    } else {
        report.note("no reference norm supplied; bound reported, nothing to falsify");
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// The norm inequality on an analytic model, where both norms are exact.
pub fn check_thurston_bound_model(
    target: &ModelTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("thurston-bound", digest);
    let m = &target.model;
    let form = m.harmonic_form(settings.quad_tol)?;
    let area = m.fiber_area();
    let harmonic_norm = (area * form.c()).sqrt();
    let p = m.clone();
    let neg_l2 = (area
        * crate::analytic::integrate(
            &|t| {
                let r = p.scalar_curvature(t).min(0.0);
                r * r * p.profile.f(t).powi(2)
            },
            0.0,
            m.circle_length,
            settings.quad_tol,
        )?)
    .sqrt();
    let bound = harmonic_norm * neg_l2 / (4.0 * std::f64::consts::PI);
    let chi_minus = (-m.fiber_euler_characteristic()).max(0);
    let mut max_hess = 0.0f64;
    for i in 0..1024 {
        max_hess = max_hess.max(form.hessian_norm_sq(m.circle_length * i as f64 / 1024.0));
    }

    report.put("harmonic_norm", harmonic_norm, "length^(1/2)");
    report.put("curvature_l2", neg_l2, "length^(-1/2)");
    report.put("bound", bound, "1");
    report.put("chi_minus_fiber", chi_minus as f64, "1");
    report.put("max_hessian_norm", max_hess.sqrt(), "length^-2");
    report.tolerance("tol", settings.tol_discrete);
    if m.fiber == FiberGeometry::Sphere {
        report.note("sphere fiber: the norm inequality's hypothesis fails on this model");
    } else if let Some(reference) = target.reference_thurston {
        let tol = settings.tol_discrete * reference.abs().max(1.0);
        report.put("reference_thurston", reference, "1");
        report.put("bound_gap", bound - reference, "1");
        report.require("reference_le_bound", reference <= bound + tol);
        report.require(
            "reference_le_chi_minus",
            reference <= chi_minus as f64 + 1e-12,
        );
    }
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Positive-scalar-curvature corollary on a model:
/// `2 pi int chi >= 1/2 (min R) int Area`.
pub fn check_psc_corollary_model(
    target: &ModelTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let m = &target.model;
    let samples = 1 << 13;
    let mut min_r = f64::INFINITY;
    for i in 0..samples {
        min_r = min_r.min(m.scalar_curvature(m.circle_length * i as f64 / samples as f64));
    }
    if min_r <= 0.0 {
        return Err(VerifyError::Precondition(format!(
            "positive scalar curvature required, min R = {min_r:.6}"
        )));
    }
    let mut report = VerificationReport::new("psc-corollary", digest);
    let form = m.harmonic_form(settings.quad_tol)?;
    // int_theta Area = A int f^2 |du| dt = A c L
    let area_integral = m.fiber_area() * form.c() * m.circle_length;
    let lhs = 2.0 * std::f64::consts::PI * m.fiber_euler_characteristic() as f64;
    let rhs = 0.5 * min_r * area_integral;
    report.put("lhs", lhs, "1");
    report.put("rhs", rhs, "1");
    report.put("slack", lhs - rhs, "1");
    report.put("min_r", min_r, "length^-2");
    report.put("area_integral", area_integral, "length^2");
    report.tolerance("equality_rel", EQUALITY_TOL);
    report.require("lhs_ge_rhs", lhs >= rhs - EQUALITY_TOL * lhs.abs().max(1.0));
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Positive-scalar-curvature corollary on a mesh (rejects inputs whose
/// lumped curvature minimum is not positive).
pub fn check_psc_corollary_mesh(
    target: &MeshTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let field = deficit_angles(&target.complex, &target.metric);
    let stats = scalar_stats(&field, &target.metric);
    if stats.min_r <= 0.0 {
        return Err(VerifyError::Precondition(format!(
            "positive scalar curvature required, lumped min R = {:.6}",
            stats.min_r
        )));
    }
    let mut report = VerificationReport::new("psc-corollary", digest);
    let solved = solve_and_sweep(target, settings)?;
    let lhs = 2.0 * std::f64::consts::PI * solved.table.chi_integral;
    let rhs = 0.5 * stats.min_r * solved.table.area_integral;
    report.put("lhs", lhs, "1");
    report.put("rhs", rhs, "1");
    report.put("slack", lhs - rhs, "1");
    report.put("min_r", stats.min_r, "length^-2");
    report.put("area_integral", solved.table.area_integral, "length^2");
    report.tolerance("tol_discrete", settings.tol_discrete);
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    report.require("lhs_ge_rhs", lhs >= rhs - settings.tol_discrete * scale);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Systolic inequality on a sphere-fiber model: `(min R) sys2 <= 8 pi`,
/// with the proof steps `Area >= N sys2` and `chi <= 2N` at sampled levels.
pub fn check_systole_model(
    target: &ModelTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let m = &target.model;
    let check = m.systole_check()?;
    if check.min_r <= 0.0 {
        return Err(VerifyError::Precondition(format!(
            "positive scalar curvature required, min R = {:.6}",
            check.min_r
        )));
    }
    let mut report = VerificationReport::new("systole", digest);
    let eight_pi = 8.0 * std::f64::consts::PI;
    // proof steps across sampled levels: fibers are connected (N = 1)
    let samples = settings.sweep_levels.max(8);
    let mut area_ok = true;
    let mut chi_ok = true;
    for i in 0..samples {
        let t = m.circle_length * (i as f64 + 0.5) / samples as f64;
        let area = m.fiber_area() * m.profile.f(t).powi(2);
        area_ok &= area >= check.sys2 - 1e-9 * check.sys2;
        chi_ok &= m.fiber_euler_characteristic() <= 2;
    }
    report.put("min_r", check.min_r, "length^-2");
    report.put("sys2", check.sys2, "length^2");
    report.put("product", check.product, "1");
    report.put("max_hessian_norm", check.max_hessian_norm, "length^-2");
    report.put("equality_gap", eight_pi - check.product, "1");
    report.tolerance("product_tol", 1e-9);
    report.require(
        "product_le_8pi",
        check.product <= eight_pi + 1e-9 * eight_pi,
    );
    report.require("area_ge_n_sys2", area_ok);
    report.require("chi_le_2n", chi_ok);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Systolic inequality on a mesh. The least sampled component area serves
/// as an upper bound for the systole, which only strengthens the verified
/// inequalities.
pub fn check_systole_mesh(
    target: &MeshTarget,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let field = deficit_angles(&target.complex, &target.metric);
    let stats = scalar_stats(&field, &target.metric);
    if stats.min_r <= 0.0 {
        return Err(VerifyError::Precondition(format!(
            "positive scalar curvature required, lumped min R = {:.6}",
            stats.min_r
        )));
    }
    let solved = solve_and_sweep(target, settings)?;
    if solved.h.energy() <= 1e-12 {
        return Err(VerifyError::Precondition(
            "class is trivial; nontrivial degree-2 homology required".into(),
        ));
    }
    let mut report = VerificationReport::new("systole", digest);
    let sys2_upper = solved
        .table
        .rows
        .iter()
        .map(|r| r.min_component_area)
        .fold(f64::INFINITY, f64::min);
    let mut area_ok = true;
    let mut chi_ok = true;
    for row in &solved.table.rows {
        area_ok &= row.area >= row.components as f64 * sys2_upper - 1e-9 * row.area.abs();
        chi_ok &= row.chi <= 2 * row.components as i64;
    }
    let product = stats.min_r * sys2_upper;
    let eight_pi = 8.0 * std::f64::consts::PI;
    let n_min = solved
        .table
        .rows
        .iter()
        .map(|r| r.components)
        .min()
        .unwrap_or(0);
    let n_max = solved
        .table
        .rows
        .iter()
        .map(|r| r.components)
        .max()
        .unwrap_or(0);
    report.put("min_r", stats.min_r, "length^-2");
    report.put("sys2_upper_bound", sys2_upper, "length^2");
    report.put("n_theta_min", n_min as f64, "1");
    report.put("n_theta_max", n_max as f64, "1");
    report.put("product", product, "1");
    report.put(
        "hessian_surrogate",
        hessian_surrogate(&target.complex, &target.metric, &solved.h),
        "length^-1",
    );
    report.tolerance("tol_discrete", settings.tol_discrete);
    report.require(
        "product_le_8pi",
        product <= eight_pi * (1.0 + settings.tol_discrete),
    );
    report.require("area_ge_n_sys2", area_ok);
    report.require("chi_le_2n", chi_ok);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Convergence of the metric-family bound to `4 pi ||alpha||_Th`:
/// nonincreasing in the neck length, and the extreme cell within 0.5%.
pub fn check_km_convergence(
    grid: &KmGrid,
    digest: &str,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let mut report = VerificationReport::new("km-convergence", digest);
    let rows = grid.rows()?;
    let pi = std::f64::consts::PI;
    let target = 4.0 * pi * grid.thurston_norm as f64;

    // the two algebraic routes to the bound agree to rounding
    let mut formula_ok = true;
    for row in &rows {
        let t = grid.thurston_norm as f64;
        let p = grid.torus_components as f64;
        let expanded = 16.0 * pi * pi * t * t
            + p * row.delta * 8.0 * pi * t
            + grid.c_delta * (p * row.delta + 2.0 * pi * t) / row.r;
        let scale = expanded.abs().max(1e-30);
        formula_ok &= (row.product_bound.powi(2) - expanded).abs() <= 1e-12 * scale;
    }

    let mut monotone = true;
    for delta in &grid.delta_values {
        let mut in_delta: Vec<&KmRow> = rows.iter().filter(|r| r.delta == *delta).collect();
        in_delta.sort_by(|a, b| a.r.total_cmp(&b.r));
        for w in in_delta.windows(2) {
            monotone &= w[1].product_bound <= w[0].product_bound + 1e-12;
        }
    }
    let best_r = grid
        .r_values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let best_delta = grid
        .delta_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let best = rows
        .iter()
        .find(|r| r.r == best_r && r.delta == best_delta)
        .expect("grid contains its extremes");

    report.put("product_bound_final", best.product_bound, "1");
    report.put("target", target, "1");
    // for the zero class the bound itself must vanish in the limit
    let rel = (best.product_bound - target).abs() / target.max(1.0);
    report.put("relative_gap", rel, "1");
    report.tolerance("final_rel", 5e-3);
    report.require("formulas_consistent", formula_ok);
    report.require("nonincreasing_in_r", monotone);
    report.require("final_within_half_percent", rel <= 5e-3);
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
