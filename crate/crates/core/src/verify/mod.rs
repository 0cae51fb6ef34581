//! Theorem-level orchestration: named checks combining the discrete and
//! analytic backends, JSON verification reports, the mesh/config file
//! formats, and the pieces the `hfib` binary is built from.

mod checks;
mod config;
mod m3t;
mod report;

pub use checks::{
    builder_mesh_from_config, check_km_convergence, check_main_identity_analytic,
    check_main_inequality_discrete, check_psc_corollary_mesh, check_psc_corollary_model,
    check_systole_mesh, check_systole_model, check_thurston_bound_mesh, check_thurston_bound_model,
    hessian_surrogate, mesh_target_from_config, model_target_from_config, CheckSettings, KmGrid,
    KmRow, MeshTarget, ModelTarget,
};
pub use config::{Config, ConfigError};
pub use m3t::{read_m3t, write_m3t, M3tContents};
pub use report::{digest_inputs, write_report_atomic, Quantity, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
    #[error(transparent)]
    Metric(#[from] crate::metric::MetricError),
    #[error(transparent)]
    Hodge(#[from] crate::hodge::HodgeError),
    #[error(transparent)]
    Fibration(#[from] crate::fibration::FibrationError),
    #[error(transparent)]
    Analytic(#[from] crate::analytic::AnalyticError),
}
