//! Douglas-Rachford splitting and its active-set accelerated variant.
//!
//! With `H_s = ½(H + Hᵀ)` and `H̃ = ρI + H_s`, each iteration solves the QP
//!
//! ```text
//!     y_k = argmin_{A y ≤ b}  ½ yᵀ H̃ y + f̃(z_k)ᵀ y,     f̃(z) = f + (H − H̃) z
//! ```
//!
//! and updates `z_{k+1} = (ρI + H)⁻¹ (ρ y_k + H z_k + ½ H_s (y_k − z_k))`.
//! Only `f̃` changes between QPs, so `H̃` and `ρI + H` are factored once.
//!
//! The hybrid solver watches the QP working set; once it has repeated for
//! `stab_count` iterations it solves the KKT system restricted to that set.
//! If the candidate satisfies the KKT conditions the solve ends exactly.
//! Otherwise the candidate replaces the iterate when its fixed-point residual
//! beats every previously accepted candidate.

use super::kkt::{kkt_active_solve, kkt_residuals};
use super::{AviProblem, IterRecord, IterationTrace, Solution, SolverSettings, Status, TraceOptions};
use crate::error::{check_len, Result};
use crate::linalg::{axpy, dist2, factor_general, Factorization, GeneralFactor, Matrix};
use crate::qp::{QpResult, QpWorkspace};

/// Per-solve state of the splitting iteration.
#[derive(Clone, Debug)]
pub struct DrWorkspace<'a> {
    problem: &'a AviProblem,
    h_s: Matrix,
    h_tilde: Matrix,
    /// `H − H̃`, so `f̃(z)` is a single product.
    coupling: Matrix,
    rho: f64,
    update_factor: GeneralFactor,
    qp: QpWorkspace,
    delta: f64,
    stable_streak: usize,
    last_active_set: Option<Vec<usize>>,
}

impl<'a> DrWorkspace<'a> {
    pub fn new(problem: &'a AviProblem, settings: &SolverSettings) -> Result<Self> {
        settings.validate()?;
        problem.check_monotone()?;
        let h = problem.h();
        let rho = settings.rho.unwrap_or_else(|| h.frobenius_norm());
        let h_s = h.sym();
        let h_tilde = h_s.shift_diagonal(rho);
        let coupling = h.sub(&h_tilde)?;
        let update_factor = factor_general(&h.shift_diagonal(rho))?;
        let qp = QpWorkspace::new(&h_tilde, problem.a(), problem.b())?;
        Ok(DrWorkspace {
            problem,
            h_s,
            h_tilde,
            coupling,
            rho,
            update_factor,
            qp,
            delta: f64::INFINITY,
            stable_streak: 0,
            last_active_set: None,
        })
    }

    pub fn problem(&self) -> &AviProblem {
        self.problem
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn h_s(&self) -> &Matrix {
        &self.h_s
    }

    pub fn h_tilde(&self) -> &Matrix {
        &self.h_tilde
    }

    pub fn qp(&self) -> &QpWorkspace {
        &self.qp
    }

    pub fn qp_mut(&mut self) -> &mut QpWorkspace {
        &mut self.qp
    }

    /// Best accepted Newton merit so far (`+∞` before the first acceptance).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `f + (H − H̃) z`
    pub fn f_tilde(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.coupling.mul_vec(z)?;
        axpy(1.0, self.problem.f(), &mut out);
        Ok(out)
    }

    /// `(ρI + H)⁻¹ (ρ y + H z + ½ H_s (y − z))` using the cached factorization.
    pub fn dr_update(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let n = self.problem.n();
        check_len(n, y.len())?;
        check_len(n, z.len())?;
        let mut rhs = self.problem.h().mul_vec(z)?;
        axpy(self.rho, y, &mut rhs);
        let diff: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
        axpy(0.5, &self.h_s.mul_vec(&diff)?, &mut rhs);
        self.update_factor.solve_in_place(&mut rhs)?;
        Ok(rhs)
    }

    /// Solves the splitting QP at `z`.
    pub fn solve_qp(&mut self, z: &[f64], warm: bool) -> Result<QpResult> {
        let c = self.f_tilde(z)?;
        self.qp.solve(&c, warm)
    }

    /// `H̃`-weighted natural residual at `z`, i.e. `z − y*(z)`.
    pub fn natural_residual(&mut self, z: &[f64], warm: bool) -> Result<Vec<f64>> {
        let y = self.solve_qp(z, warm)?.y;
        Ok(z.iter().zip(&y).map(|(a, b)| a - b).collect())
    }
}

fn solution(
    p: &AviProblem,
    x: Vec<f64>,
    lambda: Vec<f64>,
    active_set: Vec<usize>,
    status: Status,
    iterations: usize,
) -> Result<Solution> {
    let kkt_residual = kkt_residuals(p, &x, &lambda)?.max();
    Ok(Solution { x, lambda, active_set, status, iterations, kkt_residual })
}

fn start_point(p: &AviProblem, z0: &[f64]) -> Result<Vec<f64>> {
    check_len(p.n(), z0.len())?;
    Ok(z0.to_vec())
}

/// Plain Douglas-Rachford splitting. Stops when `‖y_k − z_k‖₂ ≤ eta`.
pub fn solve_dr(p: &AviProblem, s: &SolverSettings, z0: &[f64]) -> Result<(Solution, IterationTrace)> {
    solve_dr_with(p, s, z0, &TraceOptions::default())
}

pub fn solve_dr_with(
    p: &AviProblem,
    s: &SolverSettings,
    z0: &[f64],
    opts: &TraceOptions,
) -> Result<(Solution, IterationTrace)> {
    let mut ws = DrWorkspace::new(p, s)?;
    let mut z = start_point(p, z0)?;
    let mut trace = IterationTrace::default();
    let mut last: Option<QpResult> = None;
    for k in 0..s.max_iter {
        let qp = ws.solve_qp(&z, s.warm_start)?;
        let merit = dist2(&qp.y, &z);
        let z_next = ws.dr_update(&qp.y, &z)?;
        trace.records.push(IterRecord {
            k,
            merit,
            active_set_size: qp.active_set.len(),
            newton_attempted: false,
            newton_accepted: false,
            newton_merit: None,
            inner_qp_iters: qp.inner_iterations,
            dist_to_ref: opts.dist(&z_next),
            z: opts.iterate(&z),
        });
        if merit <= s.eta {
            return Ok((solution(p, qp.y, qp.lambda, qp.active_set, Status::Tolerance, k + 1)?, trace));
        }
        z = z_next;
        last = Some(qp);
    }
    let qp = last.expect("max_iter >= 1");
    Ok((solution(p, qp.y, qp.lambda, qp.active_set, Status::MaxIter, s.max_iter)?, trace))
}

/// Hybrid splitting / active-set solver.
///
/// Terminates `Exact` once the KKT system on a stabilized working set yields
/// a point satisfying the KKT conditions at `(eps_primal, eps_dual)`; falls
/// back to `Tolerance` on `‖y_k − z_k‖₂ ≤ eta` and `MaxIter` on the cap.
pub fn solve_dr_daqp(p: &AviProblem, s: &SolverSettings, z0: &[f64]) -> Result<(Solution, IterationTrace)> {
    solve_dr_daqp_with(p, s, z0, &TraceOptions::default())
}

pub fn solve_dr_daqp_with(
    p: &AviProblem,
    s: &SolverSettings,
    z0: &[f64],
    opts: &TraceOptions,
) -> Result<(Solution, IterationTrace)> {
    let mut ws = DrWorkspace::new(p, s)?;
    let mut z = start_point(p, z0)?;
    let mut trace = IterationTrace::default();
    let warm = s.warm_start;
    let mut last: Option<QpResult> = None;

    for k in 0..s.max_iter {
        let z_in = opts.iterate(&z);
        let mut qp = ws.solve_qp(&z, warm)?;
        let mut inner = qp.inner_iterations;

        if ws.last_active_set.as_ref() == Some(&qp.active_set) {
            ws.stable_streak += 1;
        } else {
            ws.stable_streak = 0;
        }

        let mut attempted = false;
        let mut accepted = false;
        let mut newton_merit = None;
        if ws.stable_streak >= s.stab_count {
            attempted = true;
            // a singular reduced system counts as a rejected attempt
            if let Ok((z_cand, lam_act)) = kkt_active_solve(p, &qp.active_set) {
                let lambda = expand(p.m(), &qp.active_set, &lam_act);
                if kkt_residuals(p, &z_cand, &lambda)?.within(s.eps_primal, s.eps_dual) {
                    trace.records.push(IterRecord {
                        k,
                        merit: dist2(&qp.y, &z),
                        active_set_size: qp.active_set.len(),
                        newton_attempted: true,
                        newton_accepted: true,
                        newton_merit: None,
                        inner_qp_iters: inner,
                        dist_to_ref: opts.dist(&z_cand),
                        z: z_in,
                    });
                    let sol = solution(p, z_cand, lambda, qp.active_set, Status::Exact, k + 1)?;
                    return Ok((sol, trace));
                }

                let qp_cand = ws.solve_qp(&z_cand, warm)?;
                inner += qp_cand.inner_iterations;
                let cand_merit = dist2(&qp_cand.y, &z_cand);
                if cand_merit < ws.delta {
                    ws.delta = cand_merit;
                    accepted = true;
                    newton_merit = Some(cand_merit);
                    z = z_cand;
                    qp = qp_cand;
                } else if warm {
                    ws.qp.set_working_set(&qp.active_set)?;
                }
            }
            ws.stable_streak = 0;
        }
        ws.last_active_set = Some(qp.active_set.clone());

        let merit = dist2(&qp.y, &z);
        let z_next = ws.dr_update(&qp.y, &z)?;
        trace.records.push(IterRecord {
            k,
            merit,
            active_set_size: qp.active_set.len(),
            newton_attempted: attempted,
            newton_accepted: accepted,
            newton_merit,
            inner_qp_iters: inner,
            dist_to_ref: opts.dist(&z_next),
            z: z_in,
        });
        if merit <= s.eta {
            // the streak may still be short when η is reached; one last reduced
            // KKT solve on the current set often certifies the exact solution
            if let Ok((x, lam_act)) = kkt_active_solve(p, &qp.active_set) {
                let lambda = expand(p.m(), &qp.active_set, &lam_act);
                if kkt_residuals(p, &x, &lambda)?.within(s.eps_primal, s.eps_dual) {
                    return Ok((solution(p, x, lambda, qp.active_set, Status::Exact, k + 1)?, trace));
                }
            }
            return Ok((solution(p, qp.y, qp.lambda, qp.active_set, Status::Tolerance, k + 1)?, trace));
        }
        z = z_next;
        last = Some(qp);
    }
    let qp = last.expect("max_iter >= 1");
    Ok((solution(p, qp.y, qp.lambda, qp.active_set, Status::MaxIter, s.max_iter)?, trace))
}

fn expand(m: usize, set: &[usize], lam_act: &[f64]) -> Vec<f64> {
    let mut lambda = vec![0.0; m];
    for (&i, &l) in set.iter().zip(lam_act) {
        lambda[i] = l;
    }
    lambda
}
