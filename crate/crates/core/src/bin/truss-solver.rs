use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use truss_fretsaw::bench::{run_bench, to_csv};
use truss_fretsaw::generate::{gen_grid, gen_path};
use truss_fretsaw::io::{format_vector, read_truss, read_vector, write_truss};
use truss_fretsaw::pcg::SolveReport;
use truss_fretsaw::pipeline::{truss_solve_detailed, PipelineConfig, PipelineInfo};
use truss_fretsaw::verify::{verify, Suite};
use truss_fretsaw::Error;

#[derive(Parser)]
#[command(name = "truss-solver", version, about = "Preconditioned solves for planar truss stiffness systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve A x = b for a truss and load vector.
    Solve {
        #[arg(long)]
        truss: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the solution here instead of stdout.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run verification suites and print a JSON report.
    Verify {
        #[arg(long)]
        truss: PathBuf,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a truss file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Sweep grid sizes and write a CSV of iteration counts and timings.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the dense condition-number oracle.
        #[arg(long)]
        no_oracle: bool,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Triangulated grid.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Strip of triangles.
    Path {
        #[arg(long)]
        len: usize,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

#[derive(Serialize)]
struct SolveJson<'a> {
    #[serde(flatten)]
    report: &'a SolveReport,
    pipeline: Option<&'a PipelineInfo>,
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MaxIterExceeded { .. } | Error::NaNDetected(_) | Error::InvariantViolated(_) => {
                Failure::Verification(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            truss,
            rhs,
            eps,
            k,
            report,
            output,
        } => {
            let t = read_truss(&truss)?;
            let b = read_vector(&rhs)?;
            let cfg = PipelineConfig {
                eps,
                k_override: k,
                ..PipelineConfig::default()
            };
            let out = truss_solve_detailed(&t, &b, &cfg)?;
            log::info!(
                "{} iterations, relative residual {:.3e}",
                out.report.iterations,
                out.report.final_relative_residual
            );
            if let Some(path) = report {
                let json = serde_json::to_string_pretty(&SolveJson {
                    report: &out.report,
                    pipeline: out.info.as_ref(),
                })
                .expect("report serializes");
                write_out(Some(&path), &json)?;
            }
            write_out(output.as_ref(), &format_vector(&out.x))
        }
        Command::Verify { truss, suite, k, seed } => {
            let suites = Suite::parse(&suite).ok_or_else(|| Failure::Input(format!("unknown suite '{suite}'")))?;
            let t = read_truss(&truss)?;
            let r = verify(&t, &suites, k, seed);
            println!("{}", r.to_json());
            if r.passed {
                Ok(())
            } else {
                Err(Failure::Verification("verification failed".into()))
            }
        }
        Command::Gen { kind } => {
            let (t, path) = match kind {
                GenKind::Grid {
                    rows,
                    cols,
                    jitter,
                    seed,
                    output,
                } => (gen_grid(rows, cols, jitter, seed)?, output),
                GenKind::Path { len, output } => (gen_path(len)?, output),
            };
            write_truss(&path, &t)?;
            Ok(())
        }
        Command::Bench {
            sizes,
            eps,
            csv,
            seed,
            no_oracle,
        } => {
            let rows = run_bench(&sizes, eps, seed, !no_oracle)?;
            write_out(csv.as_ref(), &to_csv(&rows))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
