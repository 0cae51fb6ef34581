//! Circle-valued harmonic maps on closed oriented 3-manifolds, and the
//! curvature/topology checks their level-set fibrations satisfy.
//!
//! The crate has two backends that cross-validate each other:
//!
//! * a **discrete** pipeline — simplicial 3-manifolds ([`complex`]), Regge
//!   edge-length metrics with deficit-angle curvature ([`metric`]), harmonic
//!   one-forms with prescribed integral periods ([`hodge`]), and level-surface
//!   extraction by marching tetrahedra ([`fibration`]);
//! * an **analytic** backend — warped-product model manifolds where the
//!   harmonic form, Hessian, and scalar curvature are closed-form
//!   ([`analytic`]).
//!
//! The [`verify`] module combines both into named checks with JSON reports,
//! and the `hfib` binary exposes them on the command line.

pub mod analytic;
pub mod complex;
pub mod fibration;
pub mod geom;
pub mod hodge;
pub mod metric;
pub mod snf;
pub mod verify;
