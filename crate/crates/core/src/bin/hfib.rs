//! Command-line front end: build model meshes, solve harmonic one-forms,
//! extract level surfaces, and run the named verification checks.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 input error.

use clap::{Parser, Subcommand, ValueEnum};
use hfib::fibration::extract_level;
use hfib::hodge::solve_harmonic;
use hfib::verify::{
    builder_mesh_from_config, check_km_convergence, check_main_identity_analytic,
    check_main_inequality_discrete, check_psc_corollary_mesh, check_psc_corollary_model,
    check_systole_mesh, check_systole_model, check_thurston_bound_mesh, check_thurston_bound_model,
    digest_inputs, mesh_target_from_config, model_target_from_config, write_m3t,
    write_report_atomic, CheckSettings, Config, KmGrid, VerificationReport,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hfib",
    version,
    about = "Harmonic one-forms and level-set fibration checks on closed 3-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured model mesh and write it as M3T
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// include the edge-length block
        #[arg(long)]
        lengths: bool,
    },
    /// Solve the harmonic one-form for the configured class
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Extract one level surface and export it as ASCII
    Levels {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named check: main-inequality, main-identity, thurston-bound,
    /// psc-corollary, systole, km-convergence
    Verify {
        check: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tabulate the metric-family bound over the configured grid
    SweepKm {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Merge verification reports into one JSON array
    Report {
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Box<dyn std::error::Error>> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None if text.ends_with('\n') => print!("{text}"),
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Build {
            config,
            out,
            lengths,
        } => {
            let cfg = Config::from_path(&config)?;
            let (mesh, metric) = builder_mesh_from_config(&cfg)?;
            write_m3t(&out, &mesh.complex, lengths.then_some(&metric))?;
            eprintln!(
                "wrote {} ({} vertices, {} tets)",
                out.display(),
                mesh.complex.vertex_count(),
                mesh.complex.tet_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { config, tol } => {
            let cfg = Config::from_path(&config)?;
            let settings = CheckSettings::from_config(&cfg)?;
            let target = mesh_target_from_config(&cfg)?;
            let omega = target.basis.cocycle_for_class(&target.class)?;
            let h = solve_harmonic(
                &target.complex,
                &target.metric,
                &omega,
                tol.unwrap_or(settings.solver_tol),
            )?;
            let summary = serde_json::json!({
                "mesh": target.name,
                "energy": h.energy(),
                "harmonic_norm": h.norm(),
                "closedness_residual": h.closedness_residual(),
                "coclosedness_residual": h.coclosedness_residual(),
                "iterations": h.iterations(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Levels { config, theta, out } => {
            let cfg = Config::from_path(&config)?;
            let settings = CheckSettings::from_config(&cfg)?;
            let target = mesh_target_from_config(&cfg)?;
            let omega = target.basis.cocycle_for_class(&target.class)?;
            let h = solve_harmonic(&target.complex, &target.metric, &omega, settings.solver_tol)?;
            let surface = extract_level(&target.complex, &target.metric, &h, theta)?;
            let mut buf = Vec::new();
            surface.export_ascii(&target.complex, &mut buf)?;
            emit(std::str::from_utf8(&buf)?, out.as_ref())?;
            eprintln!(
                "theta {theta}: {} components, chi {}, area {:.6}",
                surface.component_count(),
                surface.euler_characteristic(),
                surface.area()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            check,
            config,
            seed,
            tol,
            out,
            format,
        } => {
            let cfg = Config::from_path(&config)?;
            let mut settings = CheckSettings::from_config(&cfg)?;
            if let Some(seed) = seed {
                settings.seed = seed;
            }
            if let Some(tol) = tol {
                settings.tol_discrete = tol;
            }
            let digest = digest_inputs(&[
                &cfg.source,
                &check,
                &settings.seed.to_string(),
                &settings.tol_discrete.to_string(),
            ]);
            let target_kind =
                cfg.get("check", "target")
                    .unwrap_or(if cfg.has_section("manifold") {
                        "mesh"
                    } else {
                        "model"
                    });
            let report = dispatch_check(&check, target_kind, &cfg, &settings, &digest)?;
            match (&out, format) {
                (Some(path), Format::Json) => write_report_atomic(&report, path)?,
                (out, Format::Json) => emit(&serde_json::to_string_pretty(&report)?, out.as_ref())?,
                (out, Format::Csv) => emit(&report.to_csv(), out.as_ref())?,
            }
            eprintln!(
                "{}: {} ({:.3}s)",
                report.check,
                if report.pass { "PASS" } else { "FAIL" },
                report.runtime_seconds
            );
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::SweepKm {
            config,
            out,
            format,
        } => {
            let cfg = Config::from_path(&config)?;
            let grid = KmGrid::from_config(&cfg)?;
            let rows = grid.rows()?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rows)?,
                Format::Csv => {
                    let mut s =
                        String::from("r,delta,curvature_l2_sq,energy_upper,product_bound\n");
                    for row in &rows {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            row.r,
                            row.delta,
                            row.curvature_l2_sq,
                            row.energy_upper,
                            row.product_bound
                        ));
                    }
                    s
                }
            };
            emit(&text, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { files, out } => {
            if files.is_empty() {
                return Err("no report files given".into());
            }
            let mut merged = Vec::new();
            let mut all_pass = true;
            for path in &files {
                let text = std::fs::read_to_string(path)?;
                let report: VerificationReport = serde_json::from_str(&text)?;
                all_pass &= report.pass;
                merged.push(report);
            }
            emit(&serde_json::to_string_pretty(&merged)?, out.as_ref())?;
            eprintln!(
                "{} reports, {}",
                merged.len(),
                if all_pass { "all PASS" } else { "some FAIL" }
            );
            Ok(ExitCode::from(if all_pass { 0 } else { 1 }))
        }
    }
}

fn dispatch_check(
    check: &str,
    target_kind: &str,
    cfg: &Config,
    settings: &CheckSettings,
    digest: &str,
) -> Result<VerificationReport, Box<dyn std::error::Error>> {
    let report = match (check, target_kind) {
        ("main-inequality", _) => {
            check_main_inequality_discrete(&mesh_target_from_config(cfg)?, settings, digest)?
        }
        ("main-identity", _) => {
            check_main_identity_analytic(&model_target_from_config(cfg)?, settings, digest)?
        }
        ("thurston-bound", "mesh") => {
            check_thurston_bound_mesh(&mesh_target_from_config(cfg)?, settings, digest)?
        }
        ("thurston-bound", "model") => {
            check_thurston_bound_model(&model_target_from_config(cfg)?, settings, digest)?
        }
        ("psc-corollary", "mesh") => {
            check_psc_corollary_mesh(&mesh_target_from_config(cfg)?, settings, digest)?
        }
        ("psc-corollary", "model") => {
            check_psc_corollary_model(&model_target_from_config(cfg)?, settings, digest)?
        }
        ("systole", "mesh") => {
            check_systole_mesh(&mesh_target_from_config(cfg)?, settings, digest)?
        }
        ("systole", "model") => {
            check_systole_model(&model_target_from_config(cfg)?, settings, digest)?
        }
        ("km-convergence", _) => check_km_convergence(&KmGrid::from_config(cfg)?, digest)?,
        (other, kind) => return Err(format!("unknown check {other:?} for target {kind:?}").into()),
    };
    Ok(report)
}
