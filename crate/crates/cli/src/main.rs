//! Batch front door for the engine: subcommands wrap the library operations,
//! `run` executes a TOML experiment spec, and every command emits a versioned
//! JSON report (stdout or `--output`, written atomically).
//!
//! Exit codes: 0 success, 1 contract failure (an operation ran but its
//! verdict failed a declared expectation or internal check), 2 usage or
//! parse errors.

mod expr;
mod ops;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gennum::gauge::Gauge;

#[derive(Parser)]
#[command(name = "gennum", version, about = "asymptotic-net engine front door")]
struct Cli {
    #[command(flatten)]
    grid: GridArgs,
    /// Write the JSON report here (atomic) instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Coarsest dyadic grid exponent (eps = 2^-k); env GENNUM_K_MIN.
    #[arg(long, global = true)]
    k_min: Option<u32>,
    /// Finest dyadic grid exponent; env GENNUM_K_MAX.
    #[arg(long, global = true)]
    k_max: Option<u32>,
    /// Negligibility horizon; env GENNUM_Q_MAX.
    #[arg(long, global = true)]
    q_max: Option<u32>,
    /// Moderateness horizon; env GENNUM_BIG_Q_MAX.
    #[arg(long, global = true)]
    big_q_max: Option<u32>,
}

impl GridArgs {
    fn gauge(&self) -> Gauge {
        let env = |name: &str| std::env::var(name).ok().and_then(|v| v.parse::<u32>().ok());
        let k_min = self.k_min.or_else(|| env("GENNUM_K_MIN")).unwrap_or(4);
        let k_max = self.k_max.or_else(|| env("GENNUM_K_MAX")).unwrap_or(40);
        let q_max = self.q_max.or_else(|| env("GENNUM_Q_MAX")).unwrap_or(10);
        let big_q = self.big_q_max.or_else(|| env("GENNUM_BIG_Q_MAX")).unwrap_or(20);
        Gauge::dyadic(k_min, k_max, q_max, big_q)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute every task in a TOML experiment spec.
    Run {
        spec: PathBuf,
    },
    /// Hyperfinite sum of a builtin coefficient family at a point.
    Sum {
        #[arg(long)]
        family: String,
        /// Evaluation point, an expression in eps and rho (e.g. "-log(rho)").
        #[arg(long, default_value = "0.5", alias = "k", allow_hyphen_values = true)]
        z: String,
    },
    /// Hyperlimit of a sequence given as an expression in n, eps, rho.
    Hyperlim {
        #[arg(long, allow_hyphen_values = true)]
        term: String,
    },
    /// Radius of convergence of a builtin coefficient family.
    Radius {
        #[arg(long)]
        family: String,
    },
    /// Convergence test (ratio/root) for a family's series at a point.
    Classify {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value = "ratio")]
        test: String,
        /// First index the test samples from (default: past the term peak,
        /// max(8, 2 sup |z|)).
        #[arg(long)]
        n0: Option<f64>,
    },
    /// Set-of-convergence membership test for a family at a point.
    Setconv {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Contour coefficient extraction for a function net.
    Goursat {
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
        radius: String,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Transform values F(omega) of a generalized function, CSV or JSON.
    Hft {
        #[arg(long)]
        f: String,
        /// "a..b" (with --steps) or a comma-separated list.
        #[arg(long, default_value = "0..10", allow_hyphen_values = true)]
        omega: String,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Half-width exponent: h = q_h * log(1/rho).
        #[arg(long, default_value_t = 1.0)]
        q_h: f64,
        /// Write a CSV table here instead of a JSON report.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Paley–Wiener suite (holomorphy, Taylor, Plancherel, exponential type).
    Pw {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        q_h: f64,
    },
    /// Summarize a directory of JSON reports; exit 1 if any failed.
    Report {
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.grid.gauge();
    let out = match &cli.cmd {
        Cmd::Run { spec } => return spec::run_spec(spec, &cli.grid),
        Cmd::Sum { family, z } => ops::op_sum(&g, family, z),
        Cmd::Hyperlim { term } => ops::op_hyperlim(&g, term),
        Cmd::Radius { family } => ops::op_radius(&g, family),
        Cmd::Classify { family, z, test, n0 } => ops::op_classify(&g, family, z, test, *n0),
        Cmd::Setconv { family, z } => ops::op_setconv(&g, family, z),
        Cmd::Goursat { f, center, radius, n_max } => {
            ops::op_goursat(&g, f, center, radius, *n_max)
        }
        Cmd::Hft { f, omega, steps, q_h, csv } => {
            ops::op_hft(&g, f, omega, *steps, *q_h, csv.as_deref())
        }
        Cmd::Pw { f, q_h } => ops::op_pw(&g, f, *q_h),
        Cmd::Report { dir } => ops::op_report(dir),
    };
    match out {
        Ok(report) => {
            let ok = report.get("ok").and_then(|v| v.as_bool()).unwrap_or(true);
            if let Err(e) = ops::emit(&report, cli.output.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
