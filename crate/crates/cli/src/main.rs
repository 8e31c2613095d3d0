use std::path::PathBuf;
use std::process::ExitCode;

use avi_cli::{
    cmd_bench, cmd_gen, cmd_oracle, cmd_solve, default_regularization, BenchOptions, Outcome, SolveOptions,
    SolverChoice,
};
use avi_core::GenSpec;
use clap::{Parser, Subcommand};

/// Solve strongly monotone affine variational inequalities.
#[derive(Parser)]
#[command(name = "avi-solve", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the problem in a JSON file and print the solution as JSON.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "dr-daqp")]
        solver: SolverChoice,
        /// Splitting parameter (default: Frobenius norm of H).
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        stab_count: Option<usize>,
        /// Write the per-iteration trace to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// JSON file with the reference solution in field "x".
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Generate a random problem.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        seed: u64,
        /// Identity shift (default: 1 when gamma = 1, else 0).
        #[arg(long)]
        reg: Option<f64>,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Run solvers over random instances and write one CSV row per run.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        instances: u64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "dr-daqp")]
        solvers: Vec<SolverChoice>,
        /// Constraints per variable.
        #[arg(long, default_value_t = 10)]
        m_factor: usize,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
    /// Solve a small problem (m <= 16) by enumerating active sets.
    Oracle { file: PathBuf },
}

fn run(cmd: Cmd) -> avi_cli::Result<Outcome> {
    match cmd {
        Cmd::Solve { file, solver, rho, eta, max_iter, stab_count, trace, reference } => {
            let o = SolveOptions { solver, rho, eta, max_iter, stab_count, trace, reference };
            cmd_solve(&file, &o)
        }
        Cmd::Gen { n, m, gamma, seed, reg, out } => {
            let spec =
                GenSpec::new(n, m, gamma, seed).with_regularization(reg.unwrap_or(default_regularization(gamma)));
            cmd_gen(&spec, &out)
        }
        Cmd::Bench { sizes, instances, gamma, solvers, m_factor, out } => {
            cmd_bench(&BenchOptions { sizes, instances, gamma, solvers, m_factor }, &out)
        }
        Cmd::Oracle { file } => cmd_oracle(&file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            if !out.stdout.is_empty() {
                println!("{}", out.stdout);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
