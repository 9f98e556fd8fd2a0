//! dsigma: experiment runner for the orbit-geometry library.
//!
//! `dsigma run --config cfg.json [--out path] [--format csv|json] [--seed N] [-v]`
//! `dsigma verify [--n 2,3,4] [--seed N]`
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 numerical
//! failure (non-convergence or a verification residual out of tolerance).

use dsigma_cli::{config, record, tasks};

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use config::{parse_config, Task};
use tasks::AppError;

#[derive(Parser)]
#[command(name = "dsigma", version, about = "Geometry of isospectral density operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one experiment described by a JSON config document.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Overrides the seed in the config document.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Run the invariant suites and exit 0 iff every residual is in tolerance.
    Verify {
        /// Comma-separated dimensions.
        #[arg(long, default_value = "2,3,4")]
        n: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, format, seed, verbose } => run_cmd(config, out, format, seed, verbose),
        Command::Verify { n, seed } => verify_cmd(&n, seed),
    }
}

fn run_cmd(
    path: PathBuf,
    out: Option<PathBuf>,
    format: Format,
    seed: Option<u64>,
    verbose: bool,
) -> ExitCode {
    let started = Instant::now();
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(1);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config parse error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let record = match tasks::run(&cfg) {
        Ok(r) => r,
        Err(AppError::Validation(m)) => {
            eprintln!("validation error: {m}");
            return ExitCode::from(1);
        }
        Err(AppError::Numerical(m)) => {
            eprintln!("numerical error: {m}");
            return ExitCode::from(2);
        }
    };
    let rendered = match format {
        Format::Json => record::to_json(&record),
        Format::Csv => record::to_csv(&record),
    };
    if let Some(out_path) = out {
        if let Err(e) = std::fs::write(&out_path, rendered) {
            eprintln!("cannot write {}: {e}", out_path.display());
            return ExitCode::from(1);
        }
    } else {
        print!("{rendered}");
    }
    if verbose {
        eprintln!("task completed in {:.3}s", started.elapsed().as_secs_f64());
    }
    if cfg.task == Task::Verify && record.tolerance_report.iter().any(|r| !r.pass) {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn verify_cmd(n_list: &str, seed: u64) -> ExitCode {
    let dims: Result<Vec<usize>, _> = n_list.split(',').map(|s| s.trim().parse::<usize>()).collect();
    let dims = match dims {
        Ok(d) if !d.is_empty() && d.iter().all(|n| (2..=8).contains(n)) => d,
        _ => {
            eprintln!("--n must be a comma-separated list of dimensions in 2..=8");
            return ExitCode::from(1);
        }
    };
    let mut all_pass = true;
    for n in dims {
        let rows = match dsigma::verify::run_suite(n, seed) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("suite failed to run for n={n}: {e}");
                return ExitCode::from(2);
            }
        };
        for row in rows {
            println!(
                "n={n} {:<32} residual {:>12.3e}  tol {:>8.1e}  {}",
                row.name,
                row.residual,
                row.tol,
                if row.pass { "pass" } else { "FAIL" }
            );
            all_pass &= row.pass;
        }
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
