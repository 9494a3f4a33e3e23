//! Command-line front end: scripted verification suites, ρ-sweeps and
//! spectrum queries. Exit codes: 0 all checks pass, 1 check failure,
//! 2 usage/validation error. Set QKMAP_THREADS to bound the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qkmap::geometries::{fs_higher, fs_uhm, QkMetricCase};
use qkmap::invariants::linear_grid;
use qkmap::report::{run_suite, spectrum_at_rho, sweep_csv, SuiteCase, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "qkmap",
    version,
    about = "Verification suites, sweeps and spectrum queries for c-map geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification battery and emit a JSON report.
    Suite(SuiteArgs),
    /// Sweep the curvature norm along a ρ-grid and emit CSV.
    Sweep(SweepArgs),
    /// Curvature-operator spectrum at a single ρ, as JSON.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct SuiteArgs {
    /// Battery: uhm, higher, cask, rigid or hkqk-pipeline.
    #[arg(long)]
    case: String,
    /// Base dimension parameter (ignored by the uhm case).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// One-loop deformation parameter, c ≥ 0.
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    /// Number of sample points (≥ 10).
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// RNG seed; fully determines the sampled points.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Residual threshold for the ≈0 checks, in (0, 1e-2].
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Family: uhm or higher.
    #[arg(long)]
    case: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long, default_value_t = 0.1)]
    rho_min: f64,
    #[arg(long, default_value_t = 10.0)]
    rho_max: f64,
    /// Number of grid points (≥ 10, strictly increasing grid).
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Family: uhm or higher.
    #[arg(long)]
    case: String,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    /// ρ value of the query point (fiber origin otherwise).
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(out: &Option<PathBuf>, payload: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn metric_case(case: &str, k: usize, c: f64) -> Result<QkMetricCase, String> {
    match case {
        "uhm" => fs_uhm(c).map_err(|e| e.to_string()),
        "higher" => fs_higher(k, c).map_err(|e| e.to_string()),
        other => Err(format!("unknown family `{other}` (expected uhm or higher)")),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("QKMAP_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => return usage_error("QKMAP_THREADS must be a positive integer"),
        }
    }

    let cli = Cli::parse();
    match cli.command {
        Command::Suite(args) => {
            let case: SuiteCase = match args.case.parse() {
                Ok(c) => c,
                Err(e) => return usage_error(&e),
            };
            let cfg = SuiteConfig {
                case,
                k: args.k,
                c: args.c,
                samples: args.samples,
                seed: args.seed,
                tol: args.tol,
            };
            if let Err(e) = cfg.validate() {
                return usage_error(&e);
            }
            let report = match run_suite(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("suite failed to run: {e}");
                    return ExitCode::from(1);
                }
            };
            if emit(&args.out, &report.to_json()).is_err() {
                return usage_error("could not write the report file");
            }
            for check in &report.checks {
                eprintln!(
                    "{} {:<40} residual {:9.3e} (tol {:.1e})",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.max_residual,
                    check.tol
                );
            }
            if report.overall_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Sweep(args) => {
            if args.steps < 10 || !(args.rho_min > 0.0 && args.rho_max > args.rho_min) {
                return usage_error("need steps ≥ 10 and 0 < rho_min < rho_max");
            }
            let case = match metric_case(&args.case, args.k, args.c) {
                Ok(c) => c,
                Err(e) => return usage_error(&e),
            };
            let grid = linear_grid(args.rho_min, args.rho_max, args.steps);
            match sweep_csv(&case, &grid) {
                Ok(csv) => {
                    if emit(&args.out, &csv).is_err() {
                        return usage_error("could not write the CSV file");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("sweep failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Spectrum(args) => {
            let case = match metric_case(&args.case, args.k, args.c) {
                Ok(c) => c,
                Err(e) => return usage_error(&e),
            };
            if args.rho <= 0.0 {
                return usage_error("rho must be positive");
            }
            match spectrum_at_rho(&case, args.rho) {
                Ok(doc) => {
                    let mut payload =
                        serde_json::to_string_pretty(&doc).expect("spectrum serializes");
                    payload.push('\n');
                    if emit(&args.out, &payload).is_err() {
                        return usage_error("could not write the spectrum file");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("spectrum failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
