//! Closed-form backend: warped-product manifolds `dt^2 + f(t)^2 g_fiber`
//! over a circle of length `L`, where the harmonic one-form is
//! `c f(t)^{-2} dt` with `c = 1 / int f^{-2}`, and the Hessian and scalar
//! curvature are explicit. High-precision quadrature turns the level-set
//! identity into an equality check here, since the map is a submersion.

use std::sync::Arc;

pub const DEFAULT_QUAD_TOL: f64 = 1e-11;
const QUAD_INTERVAL_CAP: usize = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum AnalyticError {
    #[error("adaptive quadrature exceeded {0} intervals")]
    QuadratureFailure(usize),
    #[error("warping profile is not positive at t = {0}")]
    NonPositiveProfile(f64),
    #[error("warping profile is not periodic over the circle length")]
    NotPeriodic,
    #[error("hyperbolic fiber needs genus >= 2, got {0}")]
    BadGenus(u32),
    #[error("this check needs a sphere fiber")]
    SphereFiberRequired,
    #[error("invalid family parameters: {0}")]
    BadSpec(String),
}

/// Adaptive Simpson quadrature with an absolute tolerance and a hard cap
/// on the number of subintervals.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<f64, AnalyticError> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    struct Job {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let mut stack = vec![Job {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(fa, fm, fb, b - a),
        tol: abs_tol,
    }];
    let mut total = 0.0;
    let mut used = 1usize;
    while let Some(j) = stack.pop() {
        let m = 0.5 * (j.a + j.b);
        let lm = f(0.5 * (j.a + m));
        let rm = f(0.5 * (m + j.b));
        let left = simpson(j.fa, lm, j.fm, m - j.a);
        let right = simpson(j.fm, rm, j.fb, j.b - m);
        let err = (left + right - j.whole) / 15.0;
        if err.abs() <= j.tol || (j.b - j.a) < 1e-14 {
            total += left + right + err;
        } else {
            used += 2;
            if used > QUAD_INTERVAL_CAP {
                return Err(AnalyticError::QuadratureFailure(QUAD_INTERVAL_CAP));
            }
            let half_tol = 0.5 * j.tol;
            stack.push(Job {
                a: j.a,
                b: m,
                fa: j.fa,
                fm: lm,
                fb: j.fm,
                whole: left,
                tol: half_tol,
            });
            stack.push(Job {
                a: m,
                b: j.b,
                fa: j.fm,
                fm: rm,
                fb: j.fb,
                whole: right,
                tol: half_tol,
            });
        }
    }
    Ok(total)
}

type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Warping profile with first and second derivatives. Finite-difference
/// fallbacks are used when derivatives are not supplied; checks against
/// such profiles should relax tolerances to ~1e-5.
#[derive(Clone)]
pub struct WarpProfile {
    f: ProfileFn,
    df: Option<ProfileFn>,
    ddf: Option<ProfileFn>,
}

impl WarpProfile {
    pub fn constant(value: f64) -> Self {
        Self {
            f: Arc::new(move |_| value),
            df: Some(Arc::new(|_| 0.0)),
            ddf: Some(Arc::new(|_| 0.0)),
        }
    }

    /// `base + amplitude * sin(2 pi t / period)`.
    pub fn sinusoid(base: f64, amplitude: f64, period: f64) -> Self {
        let w = 2.0 * std::f64::consts::PI / period;
        Self {
            f: Arc::new(move |t| base + amplitude * (w * t).sin()),
            df: Some(Arc::new(move |t| amplitude * w * (w * t).cos())),
            ddf: Some(Arc::new(move |t| -amplitude * w * w * (w * t).sin())),
        }
    }

    pub fn from_fns(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
            ddf: Some(Arc::new(ddf)),
        }
    }

    /// Profile from values only; derivatives by central differences.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            df: None,
            ddf: None,
        }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.df.is_some() && self.ddf.is_some()
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn df(&self, t: f64) -> f64 {
        match &self.df {
            Some(d) => d(t),
            None => {
                let h = 1e-6;
                ((self.f)(t + h) - (self.f)(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn ddf(&self, t: f64) -> f64 {
        match &self.ddf {
            Some(d) => d(t),
            None => {
                let h = 1e-4;
                ((self.f)(t + h) - 2.0 * (self.f)(t) + (self.f)(t - h)) / (h * h)
            }
        }
    }
}

/// Fiber geometry of the warped product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiberGeometry {
    /// Unit round sphere: curvature +1, area 4 pi.
    Sphere,
    /// Flat torus of the given area.
    FlatTorus { area: f64 },
    /// Hyperbolic surface (curvature -1) of genus >= 2 and area
    /// `-2 pi chi` (the constant-curvature normalization).
    Hyperbolic { genus: u32 },
}

/// Closed-form model manifold `dt^2 + f(t)^2 g_fiber`, `t` on a circle of
/// length `circle_length`.
#[derive(Clone)]
pub struct WarpedProductModel {
    pub fiber: FiberGeometry,
    pub circle_length: f64,
    pub profile: WarpProfile,
}

impl WarpedProductModel {
    pub fn new(
        fiber: FiberGeometry,
        circle_length: f64,
        profile: WarpProfile,
    ) -> Result<Self, AnalyticError> {
        if let FiberGeometry::Hyperbolic { genus } = fiber {
            if genus < 2 {
                return Err(AnalyticError::BadGenus(genus));
            }
        }
        if let FiberGeometry::FlatTorus { area } = fiber {
            if !(area > 0.0) {
                return Err(AnalyticError::BadSpec(format!("torus area {area}")));
            }
        }
        if !(circle_length > 0.0) {
            return Err(AnalyticError::BadSpec(format!(
                "circle length {circle_length}"
            )));
        }
        let model = Self {
            fiber,
            circle_length,
            profile,
        };
        let l = circle_length;
        for i in 0..=512 {
            let t = l * i as f64 / 512.0;
            if !(model.profile.f(t) > 0.0) {
                return Err(AnalyticError::NonPositiveProfile(t));
            }
        }
        let scale = model.profile.f(0.0).abs().max(1.0);
        if (model.profile.f(0.0) - model.profile.f(l)).abs() > 1e-9 * scale
            || (model.profile.df(0.0) - model.profile.df(l)).abs() > 1e-6 * scale
        {
            return Err(AnalyticError::NotPeriodic);
        }
        Ok(model)
    }

    pub fn kappa(&self) -> f64 {
        match self.fiber {
            FiberGeometry::Sphere => 1.0,
            FiberGeometry::FlatTorus { .. } => 0.0,
            FiberGeometry::Hyperbolic { .. } => -1.0,
        }
    }

    pub fn fiber_area(&self) -> f64 {
        match self.fiber {
            FiberGeometry::Sphere => 4.0 * std::f64::consts::PI,
            FiberGeometry::FlatTorus { area } => area,
            FiberGeometry::Hyperbolic { genus } => {
                2.0 * std::f64::consts::PI * (2.0 * genus as f64 - 2.0)
            }
        }
    }

    pub fn fiber_euler_characteristic(&self) -> i64 {
        match self.fiber {
            FiberGeometry::Sphere => 2,
            FiberGeometry::FlatTorus { .. } => 0,
            FiberGeometry::Hyperbolic { genus } => 2 - 2 * genus as i64,
        }
    }

    /// Scalar curvature `R(t) = 2 kappa / f^2 - 4 f''/f - 2 (f'/f)^2`.
    pub fn scalar_curvature(&self, t: f64) -> f64 {
        let (f, df, ddf) = (self.profile.f(t), self.profile.df(t), self.profile.ddf(t));
        2.0 * self.kappa() / (f * f) - 4.0 * ddf / f - 2.0 * (df / f) * (df / f)
    }

    /// Scalar curvature of the fiber at height `t` with its induced metric.
    pub fn fiber_scalar_curvature(&self, t: f64) -> f64 {
        let f = self.profile.f(t);
        2.0 * self.kappa() / (f * f)
    }

    pub fn volume(&self, quad_tol: f64) -> Result<f64, AnalyticError> {
        let p = self.profile.clone();
        let a = self.fiber_area();
        Ok(a * integrate(&|t| p.f(t).powi(2), 0.0, self.circle_length, quad_tol)?)
    }

    /// Normalization and speed of the harmonic circle map: `h = c f^{-2} dt`
    /// with `c = 1 / int_0^L f^{-2}`, unit period.
    pub fn harmonic_form(&self, quad_tol: f64) -> Result<ModelHarmonicForm, AnalyticError> {
        let p = self.profile.clone();
        let integral = integrate(&|t| p.f(t).powi(-2), 0.0, self.circle_length, quad_tol)?;
        let c = 1.0 / integral;
        let p2 = self.profile.clone();
        let period = integrate(&|t| c * p2.f(t).powi(-2), 0.0, self.circle_length, quad_tol)?;
        Ok(ModelHarmonicForm {
            c,
            period_check: period,
            profile: self.profile.clone(),
        })
    }

    /// Both sides of the level-set identity, evaluated through the coarea
    /// formula. For these submersion models the inequality is an equality:
    /// `lhs = 2 pi chi_fiber`, `rhs = hessian_term + curvature_term`.
    pub fn main_identity_sides(&self, quad_tol: f64) -> Result<IdentitySides, AnalyticError> {
        let form = self.harmonic_form(quad_tol)?;
        let area = self.fiber_area();
        let lhs = 2.0 * std::f64::consts::PI * self.fiber_euler_characteristic() as f64;
        // 1/2 int_M |du|^-2 |Hess u|^2 |du| dV  =  A c/2 int |Hess|^2/|du|^2
        let this = self.clone();
        let f2 = form.clone();
        let hessian_term = 0.5
            * area
            * integrate(
                &|t| {
                    let s = f2.speed(t);
                    f2.hessian_norm_sq(t) / (s * s) * s * this.profile.f(t).powi(2)
                },
                0.0,
                self.circle_length,
                quad_tol,
            )?;
        let this2 = self.clone();
        let f3 = form.clone();
        let curvature_term = 0.5
            * area
            * integrate(
                &|t| this2.scalar_curvature(t) * f3.speed(t) * this2.profile.f(t).powi(2),
                0.0,
                self.circle_length,
                quad_tol,
            )?;
        Ok(IdentitySides {
            lhs,
            rhs: hessian_term + curvature_term,
            hessian_term,
            curvature_term,
        })
    }

    /// The weighted inequality for a smooth function `psi(t)`:
    /// `1/2 int (|du|^-2|Hess u|^2 + (R_M - R_fiber)) psi^2 <= -2 int psi <d psi, d|du|>`.
    pub fn weighted_inequality(
        &self,
        psi: &SmoothFunction,
        quad_tol: f64,
    ) -> Result<WeightedSides, AnalyticError> {
        let form = self.harmonic_form(quad_tol)?;
        let area = self.fiber_area();
        let this = self.clone();
        let f1 = form.clone();
        let psi1 = psi.clone();
        let lhs = 0.5
            * area
            * integrate(
                &|t| {
                    let s = f1.speed(t);
                    let integrand = f1.hessian_norm_sq(t) / (s * s) + this.scalar_curvature(t)
                        - this.fiber_scalar_curvature(t);
                    integrand * psi1.f(t).powi(2) * s * this.profile.f(t).powi(2)
                },
                0.0,
                self.circle_length,
                quad_tol,
            )?;
        let this2 = self.clone();
        let f2 = form.clone();
        let psi2 = psi.clone();
        let rhs = -2.0
            * area
            * integrate(
                &|t| {
                    // d|du|/dt = (c f^-2)' = -2 c f' f^-3
                    let dspeed = -2.0 * f2.c() * this2.profile.df(t) * this2.profile.f(t).powi(-3);
                    psi2.f(t) * psi2.df(t) * dspeed * this2.profile.f(t).powi(2)
                },
                0.0,
                self.circle_length,
                quad_tol,
            )?;
        Ok(WeightedSides {
            lhs,
            rhs,
            slack: rhs - lhs,
        })
    }

    /// Least fiber area against the curvature minimum for sphere fibers:
    /// `sys2 = 4 pi min f^2`, `product = (min R) sys2 <= 8 pi`. The least-
    /// area nonseparating surface is assumed to be a fiber in this family.
    pub fn systole_check(&self) -> Result<SystoleCheck, AnalyticError> {
        if self.fiber != FiberGeometry::Sphere {
            return Err(AnalyticError::SphereFiberRequired);
        }
        let samples = 1 << 14;
        let mut min_r = f64::INFINITY;
        let mut min_f = f64::INFINITY;
        let mut max_hess = 0.0f64;
        let form = self.harmonic_form(DEFAULT_QUAD_TOL)?;
        for i in 0..samples {
            let t = self.circle_length * i as f64 / samples as f64;
            min_r = min_r.min(self.scalar_curvature(t));
            min_f = min_f.min(self.profile.f(t));
            max_hess = max_hess.max(form.hessian_norm_sq(t));
        }
        let sys2 = 4.0 * std::f64::consts::PI * min_f * min_f;
        Ok(SystoleCheck {
            min_r,
            sys2,
            product: min_r * sys2,
            max_hessian_norm: max_hess.sqrt(),
        })
    }

    /// Homothety `g -> lambda^2 g`: profile rescaled and the circle
    /// stretched. Curvatures scale by `lambda^-2`, areas by `lambda^2`.
    pub fn scaled(&self, lambda: f64) -> Result<Self, AnalyticError> {
        let p = self.profile.clone();
        let inv = 1.0 / lambda;
        let profile = WarpProfile {
            f: Arc::new(move |t| lambda * p.f(t * inv)),
            df: {
                let p = self.profile.clone();
                Some(Arc::new(move |t| p.df(t * inv)))
            },
            ddf: {
                let p = self.profile.clone();
                Some(Arc::new(move |t| p.ddf(t * inv) * inv))
            },
        };
        Self::new(self.fiber, lambda * self.circle_length, profile)
    }
}

/// The harmonic one-form of a model: `h = c f^{-2} dt`.
#[derive(Clone)]
pub struct ModelHarmonicForm {
    c: f64,
    period_check: f64,
    profile: WarpProfile,
}

impl ModelHarmonicForm {
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Re-integrated period of the map; 1 up to quadrature error.
    pub fn period_check(&self) -> f64 {
        self.period_check
    }

    /// `|du|(t) = c / f(t)^2`.
    pub fn speed(&self, t: f64) -> f64 {
        self.c / self.profile.f(t).powi(2)
    }

    /// `|Hess u|^2(t) = 6 c^2 f'(t)^2 / f(t)^6`.
    pub fn hessian_norm_sq(&self, t: f64) -> f64 {
        let (f, df) = (self.profile.f(t), self.profile.df(t));
        6.0 * self.c * self.c * df * df / f.powi(6)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
    pub hessian_term: f64,
    pub curvature_term: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedSides {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SystoleCheck {
    pub min_r: f64,
    pub sys2: f64,
    pub product: f64,
    pub max_hessian_norm: f64,
}

/// Smooth test function with its derivative.
#[derive(Clone)]
pub struct SmoothFunction {
    f: ProfileFn,
    df: ProfileFn,
}

impl SmoothFunction {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    pub fn constant(v: f64) -> Self {
        Self::new(move |_| v, |_| 0.0)
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn df(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

/// Metric family on a fibered manifold: long product necks over the norm-
/// realizing surface, tori of area `delta`, and a fixed complement.
#[derive(Debug, Clone, Copy)]
pub struct KmFamilySpec {
    /// Thurston norm of the class (a nonnegative integer).
    pub thurston_norm: u32,
    /// number of torus components of the realizing surface
    pub torus_components: u32,
    /// area given to each torus component
    pub torus_area: f64,
    /// neck length r >= 1
    pub neck_length: f64,
    /// squared-curvature content of the complement
    pub c_delta: f64,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KmEvaluation {
    pub curvature_l2_sq: f64,
    pub energy_upper: f64,
    pub product_bound_sq: f64,
    pub product_bound: f64,
}

impl KmFamilySpec {
    pub fn validate(&self) -> Result<(), AnalyticError> {
        if !(self.torus_area > 0.0) {
            return Err(AnalyticError::BadSpec(format!(
                "torus area {}",
                self.torus_area
            )));
        }
        if !(self.neck_length >= 1.0) {
            return Err(AnalyticError::BadSpec(format!(
                "neck length {}",
                self.neck_length
            )));
        }
        if !(self.c_delta >= 0.0) {
            return Err(AnalyticError::BadSpec(format!(
                "complement content {}",
                self.c_delta
            )));
        }
        Ok(())
    }

    /// Closed forms of the family:
    /// `||R^-||^2 = C(delta) + 8 pi r T`,
    /// `||alpha||_H^2 <= (p delta + 2 pi T) / r`,
    /// and their product, whose square root tends to `4 pi T`.
    pub fn evaluate(&self) -> Result<KmEvaluation, AnalyticError> {
        self.validate()?;
        let pi = std::f64::consts::PI;
        let t = self.thurston_norm as f64;
        let p = self.torus_components as f64;
        let (delta, r, c) = (self.torus_area, self.neck_length, self.c_delta);
        let curvature_l2_sq = c + 8.0 * pi * r * t;
        let energy_upper = (p * delta + 2.0 * pi * t) / r;
        let product_bound_sq = curvature_l2_sq * energy_upper;
        Ok(KmEvaluation {
            curvature_l2_sq,
            energy_upper,
            product_bound_sq,
            product_bound: product_bound_sq.sqrt(),
        })
    }
}
