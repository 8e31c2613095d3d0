//! Affine variational inequalities over polyhedra.
//!
//! Find `x ∈ X = {x : A x ≤ b}` such that `(H x + f)ᵀ (y − x) ≥ 0` for all
//! `y ∈ X`, where `H + Hᵀ` is positive definite. Equivalently, find `(x, λ)`
//! with `H x + f + Aᵀ λ = 0` and `0 ≤ λ ⟂ b − A x ≥ 0`.

mod gradient;
mod kkt;
mod residual;
mod splitting;

use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::linalg::{dist2, factor_spd, Matrix, SpdFactor};

pub use gradient::{min_eigenvalue_sym, pg_auto_step, solve_projected_gradient, solve_projected_gradient_with};
pub use kkt::{check_solution, kkt_active_solve, kkt_residuals, KktResiduals};
pub use residual::natural_residual;
pub use splitting::{solve_dr, solve_dr_daqp, solve_dr_daqp_with, solve_dr_with, DrWorkspace};

/// The data `(H, f, A, b)` of an AVI.
#[derive(Clone, Debug, PartialEq)]
pub struct AviProblem {
    h: Matrix,
    f: Vec<f64>,
    a: Matrix,
    b: Vec<f64>,
}

impl AviProblem {
    /// Checks dimensions only; monotonicity is checked when a solver is set up.
    pub fn new(h: Matrix, f: Vec<f64>, a: Matrix, b: Vec<f64>) -> Result<Self> {
        let n = h.rows();
        if !h.is_square() {
            return Err(Error::DimensionMismatch { expected: n, found: h.cols() });
        }
        if n == 0 {
            return Err(Error::InvalidInput("problem has no variables".into()));
        }
        check_len(n, f.len())?;
        check_len(n, a.cols())?;
        check_len(a.rows(), b.len())?;
        if let Some(i) = f.iter().chain(&b).position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite vector entry at position {i}")));
        }
        Ok(AviProblem { h, f, a, b })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.rows()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Factors `½(H + Hᵀ)`, failing with [`Error::NotPositiveDefinite`] when
    /// the operator is not strongly monotone.
    pub fn check_monotone(&self) -> Result<SpdFactor> {
        factor_spd(&self.h.sym())
    }
}

/// Solver parameters. `None` in `rho` / `pg_step` selects the automatic value.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverSettings {
    /// Splitting parameter; automatic is `‖H‖_F`.
    pub rho: Option<f64>,
    /// Fixed-point tolerance on `‖y_k − z_k‖₂`.
    pub eta: f64,
    pub max_iter: usize,
    /// Consecutive repeats of the active set required before a Newton attempt.
    pub stab_count: usize,
    pub eps_primal: f64,
    pub eps_dual: f64,
    /// Projected-gradient step; automatic is `μ/‖H‖_F²` with `μ = λ_min(½(H+Hᵀ))`.
    pub pg_step: Option<f64>,
    /// Warm-start each QP from the previous working set.
    pub warm_start: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            rho: None,
            eta: 1e-6,
            max_iter: 10_000,
            stab_count: 5,
            eps_primal: 1e-8,
            eps_dual: 1e-8,
            pg_step: None,
            warm_start: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(rho) = self.rho {
            positive("rho", rho)?;
        }
        if let Some(step) = self.pg_step {
            positive("pg_step", step)?;
        }
        positive("eta", self.eta)?;
        positive("eps_primal", self.eps_primal)?;
        positive("eps_dual", self.eps_dual)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if self.stab_count == 0 {
            return Err(Error::InvalidInput("stab_count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    /// KKT conditions hold at the solver tolerances.
    Exact,
    /// Fixed-point residual fell below `eta`.
    Tolerance,
    MaxIter,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "Exact",
            Status::Tolerance => "Tolerance",
            Status::MaxIter => "MaxIter",
        })
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Exact" => Ok(Status::Exact),
            "Tolerance" => Ok(Status::Tolerance),
            "MaxIter" => Ok(Status::MaxIter),
            other => Err(Error::InvalidInput(format!("unknown status {other:?}"))),
        }
    }
}

/// Primal-dual point returned by a solver.
///
/// On `Tolerance` and `MaxIter` exits `lambda` comes from the last QP
/// subproblem: it certifies that QP, not the AVI.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub active_set: Vec<usize>,
    pub status: Status,
    pub iterations: usize,
    /// Largest scaled KKT violation of `(x, lambda)`, see [`KktResiduals`].
    pub kkt_residual: f64,
}

/// One outer iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// `‖y_k − z_k‖₂` after any accepted Newton step (for projected
    /// gradient: `‖x_{k+1} − x_k‖₂`).
    pub merit: f64,
    pub active_set_size: usize,
    pub newton_attempted: bool,
    pub newton_accepted: bool,
    /// Merit `‖ỹ_k − z̃_k‖₂` of an accepted Newton step.
    pub newton_merit: Option<f64>,
    pub inner_qp_iters: usize,
    pub dist_to_ref: Option<f64>,
    /// `z_k` entering the iteration, kept only on request.
    pub z: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_inner_iterations(&self) -> usize {
        self.records.iter().map(|r| r.inner_qp_iters).sum()
    }

    pub fn newton_attempts(&self) -> usize {
        self.records.iter().filter(|r| r.newton_attempted).count()
    }

    pub fn newton_accepts(&self) -> usize {
        self.records.iter().filter(|r| r.newton_accepted).count()
    }

    /// Merits of the accepted Newton steps, in iteration order.
    pub fn accepted_newton_merits(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.newton_merit).collect()
    }

    /// First iteration whose iterate is within `tol` of the reference.
    pub fn first_within(&self, tol: f64) -> Option<usize> {
        self.records.iter().find(|r| r.dist_to_ref.is_some_and(|d| d <= tol)).map(|r| r.k)
    }
}

/// Extra diagnostics a solve can collect.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceOptions {
    /// Reference solution for the `dist_to_ref` column.
    pub reference: Option<Vec<f64>>,
    /// Keep every `z_k` in the trace.
    pub keep_iterates: bool,
}

impl TraceOptions {
    pub fn with_reference(x: &[f64]) -> Self {
        TraceOptions { reference: Some(x.to_vec()), keep_iterates: false }
    }

    pub(crate) fn dist(&self, x: &[f64]) -> Option<f64> {
        self.reference.as_deref().map(|r| dist2(x, r))
    }

    pub(crate) fn iterate(&self, z: &[f64]) -> Option<Vec<f64>> {
        self.keep_iterates.then(|| z.to_vec())
    }
}
