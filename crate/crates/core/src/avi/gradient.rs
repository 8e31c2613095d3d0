//! Projected-gradient baseline: `x⁺ = Π_X(x − α (H x + f))`.

use super::kkt::kkt_residuals;
use super::{AviProblem, IterRecord, IterationTrace, Solution, SolverSettings, Status, TraceOptions};
use crate::error::{check_len, Result};
use crate::linalg::{dist2, is_positive_definite, Matrix};
use crate::qp::QpWorkspace;

/// Smallest eigenvalue of a symmetric matrix by bisection on positive
/// definiteness of `M − σI`.
pub fn min_eigenvalue_sym(m: &Matrix) -> f64 {
    let bound = m.frobenius_norm();
    let is_pd = |sigma: f64| is_positive_definite(&m.shift_diagonal(-sigma));
    let (mut lo, mut hi) = (-bound, bound);
    if !is_pd(lo) {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if is_pd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * bound.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    lo
}

/// `μ / L²` with `μ = λ_min(½(H + Hᵀ))` and `L = ‖H‖_F ≥ ‖H‖₂`.
pub fn pg_auto_step(p: &AviProblem) -> f64 {
    let mu = min_eigenvalue_sym(&p.h().sym());
    let l = p.h().frobenius_norm();
    mu / (l * l)
}

pub fn solve_projected_gradient(p: &AviProblem, s: &SolverSettings, z0: &[f64]) -> Result<(Solution, IterationTrace)> {
    solve_projected_gradient_with(p, s, z0, &TraceOptions::default())
}

/// Stops when `‖x_{k+1} − x_k‖₂ ≤ eta`. Never reports `Exact`.
pub fn solve_projected_gradient_with(
    p: &AviProblem,
    s: &SolverSettings,
    z0: &[f64],
    opts: &TraceOptions,
) -> Result<(Solution, IterationTrace)> {
    s.validate()?;
    p.check_monotone()?;
    check_len(p.n(), z0.len())?;
    let alpha = s.pg_step.unwrap_or_else(|| pg_auto_step(p));
    let mut proj = QpWorkspace::new(&Matrix::identity(p.n()), p.a(), p.b())?;
    let mut x = z0.to_vec();
    let mut trace = IterationTrace::default();
    for k in 0..s.max_iter {
        // Euclidean projection of v: minimize ½‖y‖² − vᵀy
        let g = p.h().mul_vec(&x)?;
        let c: Vec<f64> = x.iter().zip(&g).zip(p.f()).map(|((xi, gi), fi)| -(xi - alpha * (gi + fi))).collect();
        let r = proj.solve(&c, s.warm_start)?;
        let step = dist2(&r.y, &x);
        trace.records.push(IterRecord {
            k,
            merit: step,
            active_set_size: r.active_set.len(),
            newton_attempted: false,
            newton_accepted: false,
            newton_merit: None,
            inner_qp_iters: r.inner_iterations,
            dist_to_ref: opts.dist(&r.y),
            z: opts.iterate(&x),
        });
        x = r.y;
        if step <= s.eta || k + 1 == s.max_iter {
            let status = if step <= s.eta { Status::Tolerance } else { Status::MaxIter };
            // projection multipliers scaled by 1/α are the AVI multiplier estimate
            let lambda: Vec<f64> = r.lambda.iter().map(|l| l / alpha).collect();
            let kkt_residual = kkt_residuals(p, &x, &lambda)?.max();
            let sol = Solution { x, lambda, active_set: r.active_set, status, iterations: k + 1, kkt_residual };
            return Ok((sol, trace));
        }
    }
    unreachable!("max_iter >= 1 is validated")
}
