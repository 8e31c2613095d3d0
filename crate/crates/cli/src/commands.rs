//! The four subcommands, as library functions returning what to print and
//! the process exit code.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use avi_core::gen::GENERATOR_VERSION;
use avi_core::{
    brute_force_solve, random_avi, solve_dr_daqp_with, solve_dr_with, solve_projected_gradient_with, AviProblem,
    GenSpec, IterationTrace, Solution, SolverSettings, Status, TraceOptions,
};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, Result, EXIT_MAX_ITER};
use crate::format::{read_reference, write_bench, write_trace, BenchRow, Metadata, ProblemFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    DrDaqp,
    /// `dr-daqp` with every QP solved from an empty working set.
    DrDaqpCold,
    Dr,
    Pg,
}

impl SolverChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverChoice::DrDaqp => "dr-daqp",
            SolverChoice::DrDaqpCold => "dr-daqp-cold",
            SolverChoice::Dr => "dr",
            SolverChoice::Pg => "pg",
        }
    }

    pub fn run(
        self,
        p: &AviProblem,
        s: &SolverSettings,
        z0: &[f64],
        opts: &TraceOptions,
    ) -> avi_core::Result<(Solution, IterationTrace)> {
        match self {
            SolverChoice::DrDaqp => solve_dr_daqp_with(p, s, z0, opts),
            SolverChoice::DrDaqpCold => {
                let s = SolverSettings { warm_start: false, ..s.clone() };
                solve_dr_daqp_with(p, &s, z0, opts)
            }
            SolverChoice::Dr => solve_dr_with(p, s, z0, opts),
            SolverChoice::Pg => solve_projected_gradient_with(p, s, z0, opts),
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dr-daqp" => Ok(SolverChoice::DrDaqp),
            "dr-daqp-cold" => Ok(SolverChoice::DrDaqpCold),
            "dr" => Ok(SolverChoice::Dr),
            "pg" => Ok(SolverChoice::Pg),
            other => Err(format!("unknown solver {other:?} (expected dr-daqp, dr-daqp-cold, dr or pg)")),
        }
    }
}

#[derive(Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub solver: SolverChoice,
    pub rho: Option<f64>,
    pub eta: Option<f64>,
    pub max_iter: Option<usize>,
    pub stab_count: Option<usize>,
    pub trace: Option<PathBuf>,
    pub reference: Option<PathBuf>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            solver: SolverChoice::DrDaqp,
            rho: None,
            eta: None,
            max_iter: None,
            stab_count: None,
            trace: None,
            reference: None,
        }
    }
}

impl SolveOptions {
    pub fn settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            rho: self.rho.or(d.rho),
            eta: self.eta.unwrap_or(d.eta),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            stab_count: self.stab_count.unwrap_or(d.stab_count),
            ..d
        }
    }
}

pub fn solution_json(sol: &Solution) -> String {
    let v = json!({
        "x": sol.x,
        "lambda": sol.lambda,
        "active_set": sol.active_set,
        "status": sol.status.to_string(),
        "iterations": sol.iterations,
        "kkt_residual": sol.kkt_residual,
    });
    serde_json::to_string_pretty(&v).expect("finite values serialize")
}

pub fn cmd_solve(path: &Path, o: &SolveOptions) -> Result<Outcome> {
    let p = ProblemFile::read(path)?.problem;
    let s = o.settings();
    s.validate()?;
    let opts = match &o.reference {
        Some(r) => TraceOptions::with_reference(&read_reference(r, p.n())?),
        None => TraceOptions::default(),
    };
    let (sol, trace) = o.solver.run(&p, &s, &vec![0.0; p.n()], &opts)?;
    if let Some(t) = &o.trace {
        write_trace(t, &trace)?;
    }
    let code = if sol.status == Status::MaxIter { EXIT_MAX_ITER } else { 0 };
    Ok(Outcome { stdout: solution_json(&sol), code })
}

/// Regularization used when none is given: 1 for a purely skew `H`, else 0.
pub fn default_regularization(gamma: f64) -> f64 {
    if gamma == 1.0 {
        1.0
    } else {
        0.0
    }
}

pub fn cmd_gen(spec: &GenSpec, out: &Path) -> Result<Outcome> {
    let p = random_avi(spec)?;
    let file = ProblemFile {
        problem: p,
        metadata: Some(Metadata {
            seed: Some(spec.seed),
            gamma_asym: Some(spec.gamma_asym),
            regularization: Some(spec.regularization),
            generator_version: Some(GENERATOR_VERSION.to_string()),
        }),
    };
    file.write(out)?;
    Ok(Outcome { stdout: String::new(), code: 0 })
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub instances: u64,
    pub gamma: f64,
    pub solvers: Vec<SolverChoice>,
    /// Constraints per variable.
    pub m_factor: usize,
}

fn bench_one(n: usize, m: usize, gamma: f64, seed: u64, solvers: &[SolverChoice]) -> Vec<BenchRow> {
    let row = |solver: SolverChoice| BenchRow {
        n,
        m,
        gamma,
        seed,
        solver: solver.to_string(),
        status: "Error".into(),
        iterations: None,
        inner_qp_iters: None,
        newton_attempts: None,
        newton_accepts: None,
        wall_time_s: 0.0,
    };
    let spec = GenSpec::new(n, m, gamma, seed).with_regularization(default_regularization(gamma));
    let Ok(p) = random_avi(&spec) else {
        return solvers.iter().map(|&s| row(s)).collect();
    };
    let settings = SolverSettings::default();
    let z0 = vec![0.0; n];
    solvers
        .iter()
        .map(|&solver| {
            let start = Instant::now();
            let res = solver.run(&p, &settings, &z0, &TraceOptions::default());
            let wall_time_s = start.elapsed().as_secs_f64();
            match res {
                Ok((sol, trace)) => BenchRow {
                    status: sol.status.to_string(),
                    iterations: Some(sol.iterations),
                    inner_qp_iters: Some(trace.total_inner_iterations()),
                    newton_attempts: Some(trace.newton_attempts()),
                    newton_accepts: Some(trace.newton_accepts()),
                    wall_time_s,
                    ..row(solver)
                },
                Err(_) => BenchRow { wall_time_s, ..row(solver) },
            }
        })
        .collect()
}

/// Runs every solver on seeds `1..=instances` for each size. Instances run
/// in parallel; rows come back sorted by size, then seed, then solver in the
/// order given.
pub fn bench_rows(o: &BenchOptions) -> Result<Vec<BenchRow>> {
    if o.sizes.is_empty() || o.sizes.contains(&0) {
        return Err(CliError::Usage("sizes must be a non-empty list of positive integers".into()));
    }
    if o.solvers.is_empty() {
        return Err(CliError::Usage("at least one solver is required".into()));
    }
    if !(0.0..=1.0).contains(&o.gamma) {
        return Err(CliError::Usage(format!("gamma must lie in [0, 1], got {}", o.gamma)));
    }
    let mut sizes = o.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let jobs: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| (1..=o.instances).map(move |s| (n, s))).collect();
    Ok(jobs.par_iter().flat_map_iter(|&(n, seed)| bench_one(n, o.m_factor * n, o.gamma, seed, &o.solvers)).collect())
}

pub fn cmd_bench(o: &BenchOptions, out: &Path) -> Result<Outcome> {
    let rows = bench_rows(o)?;
    write_bench(out, &rows)?;
    Ok(Outcome { stdout: String::new(), code: 0 })
}

pub fn cmd_oracle(path: &Path) -> Result<Outcome> {
    let p = ProblemFile::read(path)?.problem;
    let r = brute_force_solve(&p)?;
    let v = json!({
        "x": r.x,
        "lambda": r.lambda,
        "active_set": r.active_set,
        "strictly_complementary": r.strictly_complementary,
        "certified": r.certified,
    });
    Ok(Outcome { stdout: serde_json::to_string_pretty(&v).expect("finite values serialize"), code: 0 })
}
