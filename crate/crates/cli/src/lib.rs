//! Library half of the `avi-solve` command: file formats and subcommands.

pub mod commands;
pub mod error;
pub mod format;

pub use commands::{
    bench_rows, cmd_bench, cmd_gen, cmd_oracle, cmd_solve, default_regularization, BenchOptions, Outcome, SolveOptions,
    SolverChoice,
};
pub use error::{CliError, Result};
pub use format::{read_csv, BenchRow, Metadata, ProblemFile, TraceRow};
