//! Acceptance suite: every release criterion as one test with a printed
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

use hfib::analytic::{
    FiberGeometry, SmoothFunction, WarpProfile, WarpedProductModel, DEFAULT_QUAD_TOL,
};
use hfib::complex::{
    build_surface_times_circle, build_three_torus, FiberKind, HomologyClass, ModelMesh,
};
use hfib::fibration::sweep;
use hfib::hodge::{pointwise_speed, solve_harmonic, solve_harmonic_with, SolveOptions};
use hfib::metric::{deficit_angles, scalar_stats, ReggeMetric};
use hfib::verify::{
    check_km_convergence, check_main_inequality_discrete, check_systole_model,
    check_thurston_bound_mesh, check_thurston_bound_model, CheckSettings, KmGrid, MeshTarget,
    ModelTarget,
};
use std::f64::consts::PI;
use std::time::Instant;

const FOUR_PI: f64 = 4.0 * PI;
const EIGHT_PI: f64 = 8.0 * PI;

fn conclude(name: &str, checks: &[(&str, bool)]) {
    let pass = checks.iter().all(|(_, ok)| *ok);
    println!("criterion {name}: {}", if pass { "PASS" } else { "FAIL" });
    for (what, ok) in checks {
        assert!(*ok, "criterion {name}: {what} failed");
    }
}

fn model(fiber: FiberGeometry, profile: WarpProfile) -> WarpedProductModel {
    WarpedProductModel::new(fiber, 1.0, profile).unwrap()
}

fn product_target(fiber: FiberKind, m: usize, coords: Vec<i64>) -> MeshTarget {
    let mesh = build_surface_times_circle(fiber, m).unwrap();
    let metric = ReggeMetric::from_model(&mesh).unwrap();
    MeshTarget::from_model_mesh(mesh, metric, HomologyClass::surface(coords))
}

fn torus_target(n: usize, coords: Vec<i64>) -> MeshTarget {
    let mesh = build_three_torus(n).unwrap();
    let metric = ReggeMetric::from_model(&mesh).unwrap();
    MeshTarget::from_model_mesh(mesh, metric, HomologyClass::surface(coords))
}

fn solved(mesh: &ModelMesh, coords: Vec<i64>) -> (ReggeMetric, hfib::hodge::HarmonicOneForm) {
    let g = ReggeMetric::from_model(mesh).unwrap();
    let omega = mesh
        .cocycle_basis
        .cocycle_for_class(&HomologyClass::surface(coords))
        .unwrap();
    let h = solve_harmonic(&mesh.complex, &g, &omega, 1e-10).unwrap();
    (g, h)
}

#[test]
fn criterion_1_analytic_identity_submersion_equality() {
    let mut checks: Vec<(&str, bool)> = Vec::new();

    let t0 = Instant::now();
    let round = model(FiberGeometry::Sphere, WarpProfile::constant(1.0))
        .main_identity_sides(DEFAULT_QUAD_TOL)
        .unwrap();
    let round_time = t0.elapsed().as_secs_f64();
    checks.push(("round lhs = 4pi", (round.lhs - FOUR_PI).abs() <= 1e-12));
    checks.push((
        "round equality",
        (round.lhs - round.rhs).abs() <= 1e-8 * FOUR_PI,
    ));
    checks.push(("round runtime < 1s", round_time < 1.0));

    let t0 = Instant::now();
    let warped = model(FiberGeometry::Sphere, WarpProfile::sinusoid(1.0, 0.3, 1.0))
        .main_identity_sides(DEFAULT_QUAD_TOL)
        .unwrap();
    let warped_time = t0.elapsed().as_secs_f64();
    checks.push((
        "warped equality (rel 1e-8)",
        (warped.lhs - warped.rhs).abs() <= 1e-8 * warped.lhs.abs(),
    ));
    checks.push(("warped hessian term > 0", warped.hessian_term > 0.0));
    checks.push(("warped runtime < 1s", warped_time < 1.0));

    let t0 = Instant::now();
    let hyperbolic = model(
        FiberGeometry::Hyperbolic { genus: 2 },
        WarpProfile::constant(1.0),
    )
    .main_identity_sides(DEFAULT_QUAD_TOL)
    .unwrap();
    let hyp_time = t0.elapsed().as_secs_f64();
    checks.push((
        "hyperbolic lhs = -4pi",
        (hyperbolic.lhs + FOUR_PI).abs() <= 1e-12,
    ));
    checks.push((
        "hyperbolic equality",
        (hyperbolic.lhs - hyperbolic.rhs).abs() <= 1e-8 * FOUR_PI,
    ));
    checks.push(("hyperbolic runtime < 1s", hyp_time < 1.0));

    conclude("1 (analytic identity, submersion equality)", &checks);
}

#[test]
fn criterion_2_flat_torus_null_case() {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let settings = CheckSettings::default();
    for n in [2usize, 3, 4] {
        let target = torus_target(n, vec![0, 0, 1]);
        let field = deficit_angles(&target.complex, &target.metric);
        let max_deficit = field.deficits().iter().fold(0.0f64, |m, &d| m.max(d.abs()));
        checks.push(("deficits <= 1e-12", max_deficit <= 1e-12));

        let report = check_main_inequality_discrete(&target, &settings, "acceptance").unwrap();
        checks.push(("inequality pass", report.pass));
        checks.push((
            "lhs = 0 within 1e-10",
            report.value("lhs").unwrap().abs() <= 1e-10,
        ));
        checks.push((
            "rhs = 0 within 1e-10",
            report.value("rhs").unwrap().abs() <= 1e-10,
        ));
        checks.push((
            "rigidity diagnostic vanishes",
            report.value("hessian_surrogate").unwrap() <= 1e-9,
        ));

        for k in 1..=3i64 {
            let mesh = build_three_torus(n).unwrap();
            let (_, h) = solved(&mesh, vec![0, 0, k]);
            checks.push(("harmonic norm = |k|", (h.norm() - k as f64).abs() <= 1e-9));
        }
    }
    conclude("2 (flat torus null case)", &checks);
}

#[test]
fn criterion_3_discrete_equality_case_convergence() {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let settings = CheckSettings {
        sweep_levels: 12,
        seed: 5,
        ..Default::default()
    };
    let mut lhs_errs = Vec::new();
    let mut rhs_errs = Vec::new();
    for (level, m) in [(0u32, 6usize), (1, 12), (2, 24)] {
        let target = product_target(FiberKind::Sphere { level }, m, vec![1]);
        let report = check_main_inequality_discrete(&target, &settings, "acceptance").unwrap();
        checks.push(("inequality pass", report.pass));
        lhs_errs.push((report.value("lhs").unwrap() - FOUR_PI).abs());
        rhs_errs.push((report.value("rhs").unwrap() - FOUR_PI).abs());

        let mesh = build_surface_times_circle(FiberKind::Sphere { level }, m).unwrap();
        let (g, h) = solved(&mesh, vec![1]);
        let table = sweep(&mesh.complex, &g, &h, settings.sweep_levels, settings.seed).unwrap();
        checks.push((
            "every fiber has N = 1, chi = 2",
            table.rows.iter().all(|r| r.components == 1 && r.chi == 2),
        ));
    }
    // both sides land on 4 pi combinatorially; the error is rounding-level
    // at every level, so monotonicity is asserted with an absolute floor
    checks.push(("lhs within 5% at finest", lhs_errs[2] <= 0.05 * FOUR_PI));
    checks.push(("rhs within 5% at finest", rhs_errs[2] <= 0.05 * FOUR_PI));
    for errs in [&lhs_errs, &rhs_errs] {
        checks.push((
            "error non-increasing (1e-10 floor)",
            errs.windows(2).all(|w| w[1] <= w[0] + 1e-10 * FOUR_PI),
        ));
    }
    conclude("3 (discrete equality-case convergence)", &checks);
}

#[test]
fn criterion_4_coarea_cross_check() {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let cases: Vec<(ModelMesh, Vec<i64>)> = vec![
        (build_three_torus(4).unwrap(), vec![1, 1, 0]),
        (
            build_surface_times_circle(FiberKind::Sphere { level: 2 }, 12).unwrap(),
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
        let table = sweep(&mesh.complex, &g, &h, 12, 11).unwrap();
        let rel = (table.area_integral - bulk).abs() / bulk;
        checks.push(("coarea within 2%", rel <= 0.02));
    }
    conclude("4 (coarea cross-check)", &checks);
}

#[test]
fn criterion_5_thurston_bound() {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let settings = CheckSettings {
        sweep_levels: 12,
        seed: 17,
        ..Default::default()
    };

    // discrete genus-2 x circle with the constant-curvature block metric;
    // the reference norm comes from the curated model table
    let target = product_target(
        FiberKind::GluedGenus { genus: 2, grid: 6 },
        6,
        vec![0, 0, 0, 0, 1],
    );
    checks.push((
        "curated reference norm is 2",
        target.reference_thurston == Some(2.0),
    ));
    let report = check_thurston_bound_mesh(&target, &settings, "acceptance").unwrap();
    checks.push(("discrete check pass", report.pass));
    checks.push((
        "reference 2 <= bound",
        2.0 <= report.value("bound").unwrap() + 0.05 * 2.0,
    ));
    checks.push((
        "chi_minus of every fiber = 2",
        report.value("chi_minus_min") == Some(2.0),
    ));

    let mesh = build_surface_times_circle(FiberKind::GluedGenus { genus: 2, grid: 6 }, 6).unwrap();
    let (g, h) = solved(&mesh, vec![0, 0, 0, 0, 1]);
    let table = sweep(&mesh.complex, &g, &h, settings.sweep_levels, settings.seed).unwrap();
    checks.push((
        "all sampled chi_minus equal 2",
        table.rows.iter().all(|r| r.chi_minus == 2),
    ));

    // exact-cylinder analytic evaluation of the same bound
    let cylinder = ModelTarget {
        model: model(
            FiberGeometry::Hyperbolic { genus: 2 },
            WarpProfile::constant(1.0),
        ),
        reference_thurston: Some(2.0),
    };
    let report = check_thurston_bound_model(&cylinder, &settings, "acceptance").unwrap();
    checks.push(("analytic check pass", report.pass));
    let bound = report.value("bound").unwrap();
    checks.push((
        "analytic bound within 5% of 2",
        (bound - 2.0).abs() <= 0.05 * 2.0,
    ));
    conclude("5 (norm inequality and fiber bound)", &checks);
}

#[test]
fn criterion_6_metric_family_convergence() {
    let grid = KmGrid {
        thurston_norm: 2,
        torus_components: 0,
        c_delta: 100.0,
        r_values: vec![1e2, 1e3, 1e4],
        delta_values: vec![0.01],
    };
    let report = check_km_convergence(&grid, "acceptance").unwrap();
    let final_bound = report.value("product_bound_final").unwrap();
    conclude(
        "6 (metric-family convergence)",
        &[
            ("check pass", report.pass),
            (
                "final bound within 0.01% of 8pi",
                (final_bound - EIGHT_PI).abs() <= 1e-4 * EIGHT_PI,
            ),
            (
                "nonincreasing in r",
                report.value("nonincreasing_in_r") == Some(1.0),
            ),
            (
                "closed forms reproduced to 1e-12",
                report.value("formulas_consistent") == Some(1.0),
            ),
        ],
    );
}

#[test]
fn criterion_7_systole() {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let settings = CheckSettings::default();

    let round = ModelTarget {
        model: model(FiberGeometry::Sphere, WarpProfile::constant(1.0)),
        reference_thurston: None,
    };
    let report = check_systole_model(&round, &settings, "acceptance").unwrap();
    checks.push(("round check pass", report.pass));
    checks.push((
        "round product = 8pi within 1e-10",
        (report.value("product").unwrap() - EIGHT_PI).abs() <= 1e-10 * EIGHT_PI,
    ));
    checks.push((
        "round rigidity diagnostic vanishes",
        report.value("max_hessian_norm").unwrap() <= 1e-12,
    ));
    checks.push((
        "round proof steps hold",
        report.value("area_ge_n_sys2") == Some(1.0),
    ));
    checks.push((
        "round counting bound holds",
        report.value("chi_le_2n") == Some(1.0),
    ));

    // gently warped model stays inside the PSC hypothesis of the check
    let warped_psc = ModelTarget {
        model: model(FiberGeometry::Sphere, WarpProfile::sinusoid(1.0, 0.01, 1.0)),
        reference_thurston: None,
    };
    let report = check_systole_model(&warped_psc, &settings, "acceptance").unwrap();
    checks.push(("warped check pass", report.pass));
    checks.push((
        "warped product < 8pi",
        report.value("product").unwrap() < EIGHT_PI,
    ));

    // the raw model computation covers stronger warping too
    let strong = model(FiberGeometry::Sphere, WarpProfile::sinusoid(1.0, 0.1, 1.0))
        .systole_check()
        .unwrap();
    checks.push(("strongly warped product < 8pi", strong.product < EIGHT_PI));

    // proof-step inequalities on an extracted discrete fibration
    let mesh = build_surface_times_circle(FiberKind::Sphere { level: 1 }, 8).unwrap();
    let (g, h) = solved(&mesh, vec![1]);
    let table = sweep(&mesh.complex, &g, &h, 12, 23).unwrap();
    let sys2_upper = table
        .rows
        .iter()
        .map(|r| r.min_component_area)
        .fold(f64::INFINITY, f64::min);
    checks.push((
        "sampled Area >= N * sys2 (upper bound)",
        table
            .rows
            .iter()
            .all(|r| r.area >= r.components as f64 * sys2_upper - 1e-9),
    ));
    checks.push((
        "sampled chi <= 2N",
        table.rows.iter().all(|r| r.chi <= 2 * r.components as i64),
    ));
    conclude("7 (systolic inequality)", &checks);
}

#[test]
fn criterion_8_oracle_suites() {
    let mut checks: Vec<(&str, bool)> = Vec::new();

    // analytic Hessian and curvature against finite differences, 32 points
    let m = model(FiberGeometry::Sphere, WarpProfile::sinusoid(1.0, 0.3, 1.0));
    let form = m.harmonic_form(DEFAULT_QUAD_TOL).unwrap();
    // fourth-order stencils keep both truncation and cancellation near 1e-9
    let h = 1e-3;
    let d1 = |f: &dyn Fn(f64) -> f64, t: f64| {
        (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
    };
    let d2 = |f: &dyn Fn(f64) -> f64, t: f64| {
        (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h))
            / (12.0 * h * h)
    };
    let mut hess_ok = true;
    let mut curv_ok = true;
    for i in 0..32 {
        let t = i as f64 / 32.0;
        let f = |s: f64| m.profile.f(s);
        let uprime = |s: f64| form.c() / (f(s) * f(s));
        let u2 = d1(&uprime, t);
        let fsq = |s: f64| f(s) * f(s);
        let f2prime = d1(&fsq, t);
        let fd_hess = u2 * u2 + 2.0 * (0.5 * f2prime * uprime(t)).powi(2) / f(t).powi(4);
        let exact = form.hessian_norm_sq(t);
        hess_ok &= (exact - fd_hess).abs() <= 1e-6 * exact.abs().max(1e-3);

        let fd_ddf = d2(&f, t);
        let fd_df = d1(&f, t);
        let fd_r = -4.0 * fd_ddf / f(t) + 2.0 * (1.0 - fd_df * fd_df) / (f(t) * f(t));
        let exact_r = m.scalar_curvature(t);
        curv_ok &= (exact_r - fd_r).abs() <= 1e-6 * exact_r.abs().max(1.0);
    }
    checks.push(("hessian matches finite differences (1e-6, 32 pts)", hess_ok));
    checks.push((
        "curvature matches finite differences (1e-6, 32 pts)",
        curv_ok,
    ));

    // discrete solver properties
    use rand::{Rng, SeedableRng};
    let mesh = build_three_torus(2).unwrap();
    let g = ReggeMetric::from_model(&mesh).unwrap();
    let omega = mesh
        .cocycle_basis
        .cocycle_for_class(&HomologyClass::surface(vec![1, 1, 1]))
        .unwrap();
    let solved_form = solve_harmonic(&mesh.complex, &g, &omega, 1e-11).unwrap();
    let w = g.star_weights();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let mut minimal = true;
    for _ in 0..100 {
        let psi: Vec<f64> = (0..mesh.complex.vertex_count())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let mut energy = 0.0;
        for (e, [a, b]) in mesh.complex.edges().iter().enumerate() {
            let v = omega[e] as f64 - (psi[*b] - psi[*a]);
            energy += w[e] * v * v;
        }
        minimal &= solved_form.energy() <= energy + 1e-12;
    }
    checks.push(("energy minimality against 100 competitors", minimal));

    let k: Vec<i64> = (0..mesh.complex.vertex_count())
        .map(|_| rng.gen_range(-2..=2))
        .collect();
    let gauged: Vec<i64> = mesh
        .complex
        .edges()
        .iter()
        .enumerate()
        .map(|(e, [a, b])| omega[e] + (k[*b] - k[*a]))
        .collect();
    let gauged_form = solve_harmonic(&mesh.complex, &g, &gauged, 1e-11).unwrap();
    checks.push((
        "gauge invariance within 1e-10",
        solved_form
            .values()
            .iter()
            .zip(gauged_form.values())
            .all(|(a, b)| (a - b).abs() <= 1e-10),
    ));

    let guess: Vec<f64> = (0..mesh.complex.vertex_count())
        .map(|_| rng.gen_range(-5.0..5.0))
        .collect();
    let other = solve_harmonic_with(
        &mesh.complex,
        &g,
        &omega,
        SolveOptions {
            tol: 1e-11,
            initial_guess: Some(guess),
            ..Default::default()
        },
    )
    .unwrap();
    let mut diff = 0.0;
    for (e, (a, b)) in solved_form.values().iter().zip(other.values()).enumerate() {
        diff += w[e] * (a - b) * (a - b);
    }
    checks.push((
        "uniqueness within 1e-9 in the energy norm",
        diff.sqrt() <= 1e-9,
    ));

    // weighted inequality with a nontrivial test function stays an equality
    let psi = SmoothFunction::new(
        |t| 0.4 + (2.0 * PI * t).sin(),
        |t| 2.0 * PI * (2.0 * PI * t).cos(),
    );
    let wi = m.weighted_inequality(&psi, DEFAULT_QUAD_TOL).unwrap();
    checks.push((
        "weighted inequality slack ~ 0 on submersions",
        wi.slack.abs() <= 1e-8,
    ));

    // lumped curvature statistics on the hyperbolic-block product
    let mesh = build_surface_times_circle(FiberKind::GluedGenus { genus: 2, grid: 5 }, 4).unwrap();
    let g = ReggeMetric::from_model(&mesh).unwrap();
    let field = deficit_angles(&mesh.complex, &g);
    let stats = scalar_stats(&field, &g);
    checks.push((
        "total curvature equals 4 pi chi(fiber)",
        (stats.total_curvature + EIGHT_PI).abs() <= 1e-9,
    ));
    conclude("8 (oracle suites)", &checks);
}
