//! `hypheat`: heat kernels on hyperbolic space and checks of gradient estimates.
//!
//! Exit status: 0 when every check passes, 1 when a violation is found, 2 on
//! bad input. Machine-readable output goes to stdout (or `--output`), human
//! summaries to stderr.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hypheat::estimates::EstimateId;
use hypheat::kernel::{alpha_profile, kernel};
use hypheat::series::{
    verify_dominance_inequalities, verify_first_sign_argument, verify_second_sign_argument, DEFAULT_DOMINANCE_BOUND,
    DEFAULT_ORDER,
};
use hypheat::verify::{
    find_odd_constant_witness, run_comparison_report, run_concavity_scan, run_grid_scan, run_harnack_suite,
    run_superposition_suite, GridSpec,
};
use hypheat::{Error, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "hypheat",
    version,
    about = "Heat kernels on hyperbolic space and Li-Yau type estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate K_n(t, r) and its log-derivatives.
    Kernel {
        #[arg(short = 'n', long)]
        dim: usize,
        #[arg(short, long, allow_negative_numbers = true)]
        t: f64,
        #[arg(short, long, allow_negative_numbers = true)]
        r: f64,
    },
    /// Check an estimate on kernel grids and random superpositions.
    Verify(VerifyArgs),
    /// Exact power-series sign checks.
    Series {
        which: SeriesKind,
        /// Series order, or the largest k for `dominance`.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Slack of every estimate at every grid point.
    Compare {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKind {
    First,
    Second,
    Dominance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GridArgs {
    /// Dimensions (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    dim: Vec<usize>,
    /// Grid times; defaults to 0.05 ... 10.
    #[arg(long, value_delimiter = ',')]
    t_values: Vec<f64>,
    /// Grid radii; defaults to 0 plus 64 log-spaced radii in [1e-3, 20].
    #[arg(long, value_delimiter = ',')]
    r_values: Vec<f64>,
}

impl GridArgs {
    fn grid(&self, dims: Vec<usize>) -> Result<GridSpec, Error> {
        let mut g = GridSpec::default_for(dims);
        if !self.t_values.is_empty() {
            g.t_values = self.t_values.clone();
        }
        if !self.r_values.is_empty() {
            g.r_values = self.r_values.clone();
        }
        g.validate()?;
        Ok(g)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// li-yau, bakry-phi, yau, bakry-qian, sharp-h3, sharp-h3-simple, linearized-h3,
    /// general, beta-family, dt-lower, harnack or concavity.
    estimate: String,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Use m = n in the lower bound on d_t log u even for even n.
    #[arg(long)]
    use_odd_constant: bool,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Ricci constant; defaults to n - 1.
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    r0: f64,
    /// Points in each s grid of the concavity scan.
    #[arg(long, default_value_t = 200)]
    s_grid: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
struct Outcome {
    body: String,
    passed: bool,
    output: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn cmd_kernel(n: usize, t: f64, r: f64) -> Result<Outcome, Error> {
    let k = kernel(n, t, r)?;
    let a = alpha_profile(n, t, r)?;
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "dim": n,
        "t": t,
        "r": r,
        "log_k": k.log_k,
        "dr_log_k": k.dr_log_k,
        "dt_log_k": k.dt_log_k,
        "alpha": a.alpha,
        "log_alpha": a.log_alpha,
        "method": k.method.as_str(),
    });
    Ok(Outcome {
        body: to_json(&v),
        passed: true,
        output: None,
    })
}

fn parse_estimate(a: &VerifyArgs, n: usize) -> Result<EstimateId, Error> {
    Ok(match a.estimate.as_str() {
        "li-yau" => EstimateId::li_yau(a.alpha, a.k)?,
        "bakry-phi" => EstimateId::BakryPhi { k: a.k },
        "yau" => EstimateId::Yau { k: a.k },
        "bakry-qian" => EstimateId::BakryQian { k: a.k },
        "sharp-h3" => EstimateId::SharpH3,
        "sharp-h3-simple" => EstimateId::SharpH3Simple,
        "linearized-h3" => EstimateId::linearized_h3(a.r0)?,
        "general" | "general-odd" | "general-even" => EstimateId::general_for(n),
        "beta-family" => EstimateId::beta_family(a.beta)?,
        "dt-lower" => EstimateId::DtLower {
            odd_constant: a.use_odd_constant,
        },
        other => return Err(usage(format!("unknown estimate '{other}'"))),
    })
}

fn check_common(a: &VerifyArgs) -> Result<(), Error> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(usage(format!("--tol must be positive, got {}", a.tol)));
    }
    if a.trials == 0 {
        return Err(usage("--trials must be >= 1"));
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, Error> {
    check_common(a)?;
    let h3_only = matches!(a.estimate.as_str(), "sharp-h3" | "sharp-h3-simple" | "linearized-h3");
    let dims = if a.grid.dim.is_empty() {
        vec![3]
    } else {
        a.grid.dim.clone()
    };
    if h3_only && dims.iter().any(|&n| n != 3) {
        return Err(usage(format!("{} applies only to dimension 3", a.estimate)));
    }

    match a.estimate.as_str() {
        "concavity" => {
            let ts = if a.grid.t_values.is_empty() {
                vec![0.1, 1.0, 10.0]
            } else {
                a.grid.t_values.clone()
            };
            let rep = run_concavity_scan(&ts, a.s_grid)?;
            eprintln!(
                "concavity: {} t values, {} curvature rows, {}",
                ts.len(),
                rep.rows.len(),
                rep.failure.as_deref().unwrap_or("all concave")
            );
            return Ok(Outcome {
                body: to_json(&rep),
                passed: rep.passed,
                output: a.output.clone(),
            });
        }
        "harnack" => {
            let mut reports = Vec::new();
            for &n in &dims {
                let rep = run_harnack_suite(n, a.trials, a.seed, a.tol)?;
                eprintln!("n = {n}: {}", rep.summary());
                reports.push(rep);
            }
            let passed = reports.iter().all(|r| r.passed());
            let v =
                json!({ "schema_version": SCHEMA_VERSION, "estimate": "harnack", "seed": a.seed, "reports": reports });
            return Ok(Outcome {
                body: to_json(&v),
                passed,
                output: a.output.clone(),
            });
        }
        _ => {}
    }

    let mut passed = true;
    let mut per_dim = Vec::new();
    for &n in &dims {
        let est = parse_estimate(a, n)?;
        let grid = a.grid.grid(vec![n])?;
        let g = run_grid_scan(&est, &grid, a.tol)?;
        let s = run_superposition_suite(&est, n, a.trials, a.seed, a.tol)?;
        eprintln!("n = {n} grid: {}", g.summary());
        eprintln!("n = {n} superposition: {}", s.summary());
        let witness = if matches!(est, EstimateId::DtLower { odd_constant: true }) && n % 2 == 0 {
            let w = find_odd_constant_witness(&grid)?;
            if let Some(w) = &w {
                eprintln!("n = {n} witness: t = {}, r = {}, slack = {:.6e}", w.t, w.r, w.slack);
            }
            w
        } else {
            None
        };
        passed &= g.passed() && s.passed();
        per_dim.push(json!({ "dim": n, "grid": g, "superposition": s, "witness": witness }));
    }
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "estimate": a.estimate,
        "seed": a.seed,
        "trials": a.trials,
        "passed": passed,
        "results": per_dim,
    });
    Ok(Outcome {
        body: to_json(&v),
        passed,
        output: a.output.clone(),
    })
}

fn cmd_series(which: SeriesKind, order: Option<usize>, output: Option<PathBuf>) -> Result<Outcome, Error> {
    let (body, passed) = match which {
        SeriesKind::First => {
            let r = verify_first_sign_argument(order.unwrap_or(DEFAULT_ORDER))?;
            eprintln!(
                "first argument: order {}, {} rows, passed = {}",
                r.order,
                r.rows.len(),
                r.passed
            );
            (to_json(&r), r.passed)
        }
        SeriesKind::Second => {
            let r = verify_second_sign_argument(order.unwrap_or(DEFAULT_ORDER))?;
            eprintln!(
                "second argument: order {}, {} rows, passed = {}",
                r.order,
                r.rows.len(),
                r.passed
            );
            (to_json(&r), r.passed)
        }
        SeriesKind::Dominance => {
            let bound = order.map(|o| o as u64).unwrap_or(DEFAULT_DOMINANCE_BOUND);
            let r = verify_dominance_inequalities(bound)?;
            eprintln!(
                "dominance: up to k = {bound}, {} rows, passed = {}",
                r.rows.len(),
                r.passed
            );
            (to_json(&r), r.passed)
        }
    };
    Ok(Outcome { body, passed, output })
}

fn cmd_compare(grid: &GridArgs, format: Format, output: Option<PathBuf>) -> Result<Outcome, Error> {
    let dims = if grid.dim.is_empty() { vec![3] } else { grid.dim.clone() };
    let table = run_comparison_report(&grid.grid(dims)?)?;
    let failed = table.rows.iter().filter(|r| !r.errors.is_empty()).count();
    eprintln!("compare: {} rows, {} with evaluation errors", table.rows.len(), failed);
    let body = match format {
        Format::Json => to_json(&table),
        Format::Csv => table.to_csv()?,
    };
    Ok(Outcome {
        body,
        passed: true,
        output,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Domain(_) | Error::InvalidPoint(_) => 2,
        Error::NumericalAccuracy { .. } | Error::VerificationFailure { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Kernel { dim, t, r } => cmd_kernel(*dim, *t, *r),
        Command::Verify(a) => cmd_verify(a),
        Command::Series { which, order, output } => cmd_series(*which, *order, output.clone()),
        Command::Compare { grid, format, output } => cmd_compare(grid, *format, output.clone()),
    };
    match result {
        Ok(out) => {
            let written = match &out.output {
                Some(p) => std::fs::write(p, &out.body).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    // a closed pipe (e.g. `| head`) is not an error
                    match std::io::stdout().lock().write_all(out.body.as_bytes()) {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                            Err(format!("cannot write to stdout: {e}"))
                        }
                        _ => Ok(()),
                    }
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
