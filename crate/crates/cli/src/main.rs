//! Command-line front-end: constants, projections, critical-point
//! certificates and the verification campaign.
//!
//! Exit codes: 0 all checks pass, 1 experiment failure, 2 configuration or
//! precondition error, 3 solver failure.

use bubble_tower::constants::{
    c1_closed_form, c2_closed_form, energy_constants, sphere_measure, ProblemDims,
};
use bubble_tower::experiments::{self, CampaignConfig, ExperimentReport, ResidualKind};
use bubble_tower::quadrature::QuadratureEngine;
use bubble_tower::radial_solver::{project_bubble, robin_function_radius, RadialGrid};
use bubble_tower::reduced_energy::{
    gamma_kernel, sigma_hessian_certificate, sigma_hessian_diag_closed_form, unit_ball_energy,
    NewtonOptions, ReducedPoint,
};
use bubble_tower::report::{all_passed, emit_report};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_EXPERIMENT_FAILURE: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;
const EXIT_SOLVER_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "bubble-tower",
    about = "Sign-changing bubble-tower numerics on the punctured ball: projections, reduced energy, rate verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct QuadOpts {
    /// absolute = relative quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// minimum node count for solver grids
    #[arg(long, default_value_t = 900)]
    grid_nodes: usize,
}

impl QuadOpts {
    fn engine(&self) -> QuadratureEngine {
        QuadratureEngine::with_tolerances(self.tol, self.tol)
    }
}

#[derive(Args, Clone)]
struct SweepOpts {
    #[arg(long, default_value_t = 1e-6)]
    eps_min: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps_max: f64,
    #[arg(long, default_value_t = 7)]
    eps_samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the energy constants, Gamma(0) and H(0,0) with their targets
    Constants {
        #[arg(long = "N")]
        n: u32,
        /// also write the table to a CSV file
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadOpts,
    },
    /// Newton critical-point search with the full certificate
    CriticalPoint {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0.02)]
        d_box: f64,
        #[command(flatten)]
        quad: QuadOpts,
    },
    /// Project a bubble through the Navier solver and write the field CSV
    Project {
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        csv: PathBuf,
        #[command(flatten)]
        quad: QuadOpts,
    },
    /// The Robin function H(0,0) of the ball
    Robin {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Energy-expansion rate sweep at the certified scales
    EnergySweep {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        sweep: SweepOpts,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadOpts,
    },
    /// Residual-norm rate sweep (W1 for k >= 2, W2 otherwise)
    ResidualSweep {
        #[arg(long = "N")]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        sweep: SweepOpts,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadOpts,
    },
    /// Interaction integrals on the annulus decomposition (k = 2)
    Interactions {
        #[arg(long = "N")]
        n: u32,
        #[command(flatten)]
        sweep: SweepOpts,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadOpts,
    },
    /// Run the verification campaign and write the report bundle
    Campaign {
        /// TOML config file (flat key = value)
        #[arg(long)]
        config: Option<PathBuf>,
        /// run only experiments whose name contains this string
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        quad: QuadOpts,
    },
}

#[derive(serde::Deserialize, Default)]
struct CampaignFile {
    n: Option<u32>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    grid_nodes: Option<usize>,
    only: Option<String>,
    out: Option<String>,
}

fn check_dimension(n: u32) -> Result<ProblemDims, String> {
    if !(5..=12).contains(&n) {
        return Err(format!("dimension N = {n} outside the supported range 5..12"));
    }
    ProblemDims::new(n, 1).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, (u8, String)> {
    match cli.command {
        Command::Constants { n, csv, quad } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let dims = ProblemDims::new(n, 1).unwrap();
            let engine = quad.engine();
            let c = energy_constants(&dims, &engine)
                .map_err(|e| (EXIT_SOLVER_FAILURE, e.to_string()))?;
            let g0 = gamma_kernel(0.0, &dims, &engine);
            let h00 = robin_function_radius(&dims, 1.0);
            let rows: Vec<(&str, f64, f64, f64)> = vec![
                ("alpha_N", c.alpha_n, 0.0, c.alpha_n),
                ("c1", c.c1, c.c1_error, c1_closed_form(n)),
                ("c2", c.c2, c.c2_error, c2_closed_form(n)),
                ("c3", c.c3, 0.0, c.c3),
                ("sphere_measure", c.sphere_measure, 0.0, sphere_measure(n)),
                ("gamma_0", g0.value, g0.error_estimate, c2_closed_form(n)),
                ("robin_H00", h00, 0.0, 2.0 * (n as f64 - 2.0) / n as f64),
            ];
            println!("quantity        value          error_est      closed_form");
            for (name, v, e, t) in &rows {
                println!("{name:<15} {v:<14.6e} {e:<14.3e} {t:<14.6e}");
            }
            if let Some(path) = csv {
                let mut out = String::from("quantity,value,error_estimate,closed_form\n");
                for (name, v, e, t) in &rows {
                    out.push_str(&format!("{name},{v:.16e},{e:.16e},{t:.16e}\n"));
                }
                std::fs::write(&path, out).map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CriticalPoint { n, k, d_box, quad } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let dims =
                ProblemDims::new(n, k).map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
            let engine = quad.engine();
            let re = unit_ball_energy(&dims, &engine);
            let init = ReducedPoint::centered(vec![1.0; k as usize], n, d_box)
                .map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
            let cert = re
                .find_critical_point(&init, &NewtonOptions::default())
                .map_err(|e| (EXIT_SOLVER_FAILURE, format!("Newton failed: {e}")))?;
            println!("{}", cert.to_key_value_text());
            println!("# mu_hat      = {:?}", cert.point.mu);
            println!("# iterations  = {}", cert.newton_iterations);
            println!(
                "# det(Q)      = {:.6e}  target {:.6e}  (rel dev {:.2e})",
                cert.det_q,
                cert.det_q_target,
                ((cert.det_q - cert.det_q_target) / cert.det_q_target).abs()
            );
            println!("# chain resid = {:.3e}", cert.chain_residual);
            println!("# off-block   = {:.3e}", cert.max_off_block());
            let sh = sigma_hessian_certificate(&dims);
            println!(
                "# sigma-Hessian diag (FD) = {:.6e}; closed form 2N^2-4N-4 gives {:.6e}; stated 2N^2-6N-4 gives {:.6e}",
                sh[0][0],
                sigma_hessian_diag_closed_form(&dims),
                dims.alpha() * dims.alpha()
                    * (n as f64 - 4.0)
                    * (2.0 * (n as f64) * (n as f64) - 6.0 * n as f64 - 4.0)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Project { n, mu, eps, csv, quad } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            if !(eps > 0.0 && eps < 1.0 && mu > 0.0) {
                return Err((EXIT_CONFIG_ERROR, "need 0 < eps < 1 and mu > 0".into()));
            }
            let dims = ProblemDims::new(n, 1).unwrap();
            let engine = quad.engine();
            let grid = Arc::new(
                RadialGrid::graded(&dims, eps, quad.grid_nodes, &[mu.min(0.99)])
                    .map_err(|e| (EXIT_SOLVER_FAILURE, e.to_string()))?,
            );
            let pu = project_bubble(&dims, mu, grid, &engine)
                .map_err(|e| (EXIT_SOLVER_FAILURE, e.to_string()))?;
            std::fs::write(&csv, pu.to_csv_string())
                .map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
            println!("wrote {} ({} nodes)", csv.display(), pu.values().len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Robin { n, radius } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let dims = ProblemDims::new(n, 1).unwrap();
            let h = robin_function_radius(&dims, radius);
            println!(
                "H(0,0) on the ball of radius {radius}: {h:.12e}  (unit-ball closed form {:.12e})",
                2.0 * (n as f64 - 2.0) / n as f64
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::EnergySweep { n, k, sweep, out, quad } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let dims =
                ProblemDims::new(n, k).map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
            let rep = experiments::energy_expansion_experiment(
                &dims,
                sweep.eps_min,
                sweep.eps_max,
                sweep.eps_samples,
                &quad.engine(),
            );
            finish_reports(vec![rep], out)
        }
        Command::ResidualSweep { n, k, sweep, out, quad } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let dims =
                ProblemDims::new(n, k).map_err(|e| (EXIT_CONFIG_ERROR, e.to_string()))?;
            let kind = if k >= 2 { ResidualKind::W1 } else { ResidualKind::W2 };
            let rep = experiments::residual_rate_experiment(
                &dims,
                kind,
                sweep.eps_min,
                sweep.eps_max,
                sweep.eps_samples,
                &quad.engine(),
            );
            finish_reports(vec![rep], out)
        }
        Command::Interactions { n, sweep, out, quad } => {
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let dims = ProblemDims::new(n, 2).unwrap();
            let rep = experiments::interaction_integral_experiment(
                &dims,
                sweep.eps_min,
                sweep.eps_max,
                sweep.eps_samples,
                &quad.engine(),
            );
            finish_reports(vec![rep], out)
        }
        Command::Campaign { config, only, out, quad } => {
            let file: CampaignFile = match &config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| (EXIT_CONFIG_ERROR, format!("{}: {e}", path.display())))?;
                    toml::from_str(&text)
                        .map_err(|e| (EXIT_CONFIG_ERROR, format!("config parse: {e}")))?
                }
                None => CampaignFile::default(),
            };
            let n = file.n.unwrap_or(5);
            check_dimension(n).map_err(|e| (EXIT_CONFIG_ERROR, e))?;
            let cfg = CampaignConfig {
                n,
                quad_abs_tol: file.abs_tol.unwrap_or(quad.tol),
                quad_rel_tol: file.rel_tol.unwrap_or(quad.tol),
                grid_nodes: file.grid_nodes.unwrap_or(quad.grid_nodes),
                only: only.or(file.only),
            };
            let out_dir = out.or(file.out.map(PathBuf::from));
            let reports = experiments::run_campaign(&cfg);
            if reports.is_empty() {
                return Err((
                    EXIT_CONFIG_ERROR,
                    "no experiment matches the --only filter".into(),
                ));
            }
            finish_reports(reports, out_dir)
        }
    }
}

/// Print the summary and durations, optionally write the bundle, and turn
/// gate failures into exit code 1.
fn finish_reports(
    reports: Vec<ExperimentReport>,
    out: Option<PathBuf>,
) -> Result<ExitCode, (u8, String)> {
    let bundle = emit_report(&reports);
    print!("{}", bundle.summary);
    for rep in &reports {
        println!("# {} finished in {:?}", rep.name, rep.duration);
    }
    let dir = out.unwrap_or_else(|| {
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        PathBuf::from(format!("run-{stamp}"))
    });
    bundle
        .write_to_dir(&dir)
        .map_err(|e| (EXIT_CONFIG_ERROR, format!("writing bundle: {e}")))?;
    println!("bundle written to {}", dir.display());
    if all_passed(&reports) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_EXPERIMENT_FAILURE))
    }
}
