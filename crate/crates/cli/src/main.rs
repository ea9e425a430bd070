//! `interior-svd`: singular triplets of a Matrix Market matrix nearest a target.
//!
//! Exit status is 0 when the run converged, 2 when it did not and 1 on bad
//! input.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use interior_svd::driver::{solve, SolverConfig, SolverError};
use interior_svd::sparse::read_matrix_market;

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Computes the k singular triplets of a sparse matrix nearest a target value.
#[derive(Debug, Parser)]
#[command(name = "interior-svd", version)]
struct Args {
    /// Matrix Market file.
    #[arg(long)]
    matrix: PathBuf,
    /// Target value; 0 asks for the smallest singular values.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Number of triplets.
    #[arg(long, value_parser = positive)]
    k: usize,
    /// Largest subspace dimension.
    #[arg(long)]
    m: usize,
    /// Relative tolerance on the largest residual over the 1-norm of the matrix.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_restarts: usize,
    /// Seed for the random starting vector.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    output: Format,
    /// Writes the per-restart residual estimates as CSV.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Logs progress to standard error.
    #[arg(long)]
    verbose: bool,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if args.verbose {
        env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    }
    run(&args)
}

fn run(args: &Args) -> ExitCode {
    let a = match read_matrix_market(&args.matrix) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let config = SolverConfig {
        tau: args.tau,
        k: args.k,
        m: args.m,
        tol: args.tol,
        max_restarts: args.max_restarts,
        seed: args.seed,
        verbose: args.verbose,
        ..SolverConfig::default()
    };
    let result = match solve(&a, &config) {
        Ok(r) => r,
        Err(e @ (SolverError::InvalidConfig(_) | SolverError::InvalidRequest { .. } | SolverError::ZeroMatrix)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
        Err(e) => {
            eprintln!("error: solver failed: {e}");
            return ExitCode::from(EXIT_NOT_CONVERGED);
        }
    };

    let mut stdout = std::io::stdout().lock();
    if let Err(e) = output::write_result(&mut stdout, &result, args.output) {
        eprintln!("error: cannot write results: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    if let Some(path) = &args.history {
        let written = std::fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| output::write_history(f, &result.stats.residual_history, config.k));
        if let Err(e) = written {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    }
    if result.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_CONVERGED)
    }
}
