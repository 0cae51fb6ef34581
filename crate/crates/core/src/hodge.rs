//! Harmonic one-forms with prescribed integral periods: the gradient form
//! of the circle-valued harmonic map.
//!
//! Given an integer cocycle `omega`, the solver finds the vertex potential
//! `phi` minimizing the weighted energy of `omega - d phi` and returns the
//! harmonic representative `h`. `h` keeps the periods of `omega` exactly
//! (they differ by an exact cochain); the circle-valued map itself is never
//! materialized, only `h` and per-tet local lifts.

use crate::complex::{Cycle, SimplicialComplex3, TET_EDGES};
use crate::geom::{solve3, sub, KahanSum};
use crate::metric::ReggeMetric;

#[derive(Debug, thiserror::Error)]
pub enum HodgeError {
    #[error(
        "solver did not converge: relative residual {residual:.3e} after {iterations} iterations"
    )]
    NoConvergence { residual: f64, iterations: usize },
    #[error("weighted Laplacian is indefinite (negative star weights)")]
    IndefiniteSystem,
    #[error("tolerance {0} outside (0, 1e-4]")]
    BadTolerance(f64),
    #[error("cocycle has {got} entries, complex has {expected} edges")]
    CochainLength { expected: usize, got: usize },
}

/// Real value per canonical oriented edge; reversing an edge flips the sign.
#[derive(Debug, Clone)]
pub struct Cochain1 {
    values: Vec<f64>,
}

impl Cochain1 {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A solved harmonic representative with its residual diagnostics.
#[derive(Debug, Clone)]
pub struct HarmonicOneForm {
    h: Cochain1,
    energy: f64,
    closedness_residual: f64,
    coclosedness_residual: f64,
    iterations: usize,
}

impl HarmonicOneForm {
    pub fn cochain(&self) -> &Cochain1 {
        &self.h
    }

    pub fn values(&self) -> &[f64] {
        self.h.values()
    }

    /// Squared weighted L2 norm of `h` (the Dirichlet energy of the map).
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `sqrt(energy)`: the harmonic norm of the class.
    pub fn norm(&self) -> f64 {
        self.energy.sqrt()
    }

    /// Max face sum of `h` (exact-zero up to rounding by construction).
    pub fn closedness_residual(&self) -> f64 {
        self.closedness_residual
    }

    /// Relative L2 norm of the weighted divergence.
    pub fn coclosedness_residual(&self) -> f64 {
        self.coclosedness_residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn period_on(&self, cycle: &Cycle) -> f64 {
        cycle.period_of_real(self.h.values())
    }
}

pub struct SolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub initial_guess: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 0,
            initial_guess: None,
        }
    }
}

/// Minimize the weighted energy of `omega - d phi` over vertex potentials.
pub fn solve_harmonic(
    c: &SimplicialComplex3,
    g: &ReggeMetric,
    omega: &[i64],
    tol: f64,
) -> Result<HarmonicOneForm, HodgeError> {
    solve_harmonic_with(
        c,
        g,
        omega,
        SolveOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn solve_harmonic_with(
    c: &SimplicialComplex3,
    g: &ReggeMetric,
    omega: &[i64],
    opts: SolveOptions,
) -> Result<HarmonicOneForm, HodgeError> {
    let omega_real: Vec<f64> = omega.iter().map(|&v| v as f64).collect();
    solve_with_weights(c, g.star_weights(), &omega_real, opts)
}

pub(crate) fn solve_with_weights(
    c: &SimplicialComplex3,
    weights: &[f64],
    omega: &[f64],
    opts: SolveOptions,
) -> Result<HarmonicOneForm, HodgeError> {
    if !(opts.tol > 0.0 && opts.tol <= 1e-4) {
        return Err(HodgeError::BadTolerance(opts.tol));
    }
    if omega.len() != c.edge_count() {
        return Err(HodgeError::CochainLength {
            expected: c.edge_count(),
            got: omega.len(),
        });
    }
    let n = c.vertex_count();
    // rhs = d0^T W omega
    let mut b = vec![0.0f64; n];
    for (e, [a, hd]) in c.edges().iter().enumerate() {
        let f = weights[e] * omega[e];
        b[*a] -= f;
        b[*hd] += f;
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (e, [a, hd]) in c.edges().iter().enumerate() {
            let d = weights[e] * (x[*hd] - x[*a]);
            out[*a] -= d;
            out[*hd] += d;
        }
    };
    let mut diag = vec![0.0f64; n];
    for (e, [a, hd]) in c.edges().iter().enumerate() {
        diag[*a] += weights[e];
        diag[*hd] += weights[e];
    }
    let precond: Vec<f64> = diag
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let project = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= mean);
    };

    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut phi = opts.initial_guess.clone().unwrap_or_else(|| vec![0.0; n]);
    project(&mut phi);
    let max_iter = if opts.max_iterations > 0 {
        opts.max_iterations
    } else {
        (20 * n).max(2000)
    };
    let mut iterations = 0;
    let mut residual = 0.0;
    if bnorm > 0.0 {
        // preconditioned conjugate gradient on the singular-consistent
        // system, iterates kept mean-zero
        let mut r = vec![0.0f64; n];
        apply(&phi, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        project(&mut r);
        let mut z: Vec<f64> = r.iter().zip(&precond).map(|(&v, &m)| v * m).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0f64; n];
        loop {
            residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
            if residual <= opts.tol {
                break;
            }
            if iterations >= max_iter {
                return Err(HodgeError::NoConvergence {
                    residual,
                    iterations,
                });
            }
            apply(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(HodgeError::IndefiniteSystem);
            }
            let alpha = rz / pap;
            for i in 0..n {
                phi[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            project(&mut r);
            for i in 0..n {
                z[i] = r[i] * precond[i];
            }
            let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
            iterations += 1;
        }
    }

    let h: Vec<f64> = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, [a, hd])| omega[e] - (phi[*hd] - phi[*a]))
        .collect();
    let mut energy = KahanSum::new();
    for (e, &v) in h.iter().enumerate() {
        energy.add(weights[e] * v * v);
    }
    let closedness = c
        .coboundary_on_faces(&h)
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    Ok(HarmonicOneForm {
        h: Cochain1::new(h),
        energy: energy.value().max(0.0),
        closedness_residual: closedness,
        coclosedness_residual: residual,
        iterations,
    })
}

/// Per-tet gradient of the linear interpolant of a local lift, in the
/// tet's own embedding frame. Well-defined because `dh = 0` on every face.
pub fn gradient_vectors(
    c: &SimplicialComplex3,
    g: &ReggeMetric,
    h: &HarmonicOneForm,
) -> Vec<[f64; 3]> {
    let values = h.values();
    c.tet_edges()
        .iter()
        .enumerate()
        .map(|(t, te)| {
            let ids = c.tetrahedra()[t];
            // lift increments from corner 0 along the tet's edges
            let mut v = [0.0f64; 4];
            for (slot, &(i, j)) in TET_EDGES.iter().enumerate().take(3) {
                debug_assert_eq!(i, 0);
                let sign = if ids[0] < ids[j] { 1.0 } else { -1.0 };
                v[j] = sign * values[te[slot]];
            }
            let p = &g.tet_corners()[t];
            let m = [sub(p[1], p[0]), sub(p[2], p[0]), sub(p[3], p[0])];
            solve3(m, [v[1], v[2], v[3]]).unwrap_or([0.0; 3])
        })
        .collect()
}

/// Per-tet gradient norm `|du|`.
pub fn pointwise_speed(c: &SimplicialComplex3, g: &ReggeMetric, h: &HarmonicOneForm) -> Vec<f64> {
    gradient_vectors(c, g, h)
        .into_iter()
        .map(|grad| (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt())
        .collect()
}
