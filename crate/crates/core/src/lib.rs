//! Solvers for strongly monotone affine variational inequalities (AVIs)
//!
//! ```text
//!     find x ∈ X = {x : A x ≤ b}   with   (H x + f)ᵀ (y − x) ≥ 0   for all y ∈ X
//! ```
//!
//! where `H + Hᵀ` is positive definite.
//!
//! The main entry point is [`solve_dr_daqp`], a Douglas-Rachford splitting
//! whose QP subproblems are solved by a warm-started dual active-set method
//! ([`qp`]). When the QP working set settles, the solver tries the KKT system
//! restricted to that set and returns the exact solution once it is right.
//! [`solve_dr`] and [`solve_projected_gradient`] are first-order baselines,
//! [`gen`] draws random instances, and [`oracle`] solves small instances by
//! enumeration.
//!
//! ```
//! use avi_core::{random_avi, solve_dr_daqp, GenSpec, SolverSettings, Status};
//!
//! let p = random_avi(&GenSpec::new(5, 50, 0.5, 1)).unwrap();
//! let (sol, _trace) = solve_dr_daqp(&p, &SolverSettings::default(), &[0.0; 5]).unwrap();
//! assert_eq!(sol.status, Status::Exact);
//! ```

pub mod avi;
pub mod error;
pub mod gen;
pub mod linalg;
pub mod oracle;
pub mod qp;

#[cfg(test)]
pub(crate) mod testutil;

pub use avi::{
    check_solution, kkt_active_solve, kkt_residuals, natural_residual, solve_dr, solve_dr_daqp, solve_dr_daqp_with,
    solve_dr_with, solve_projected_gradient, solve_projected_gradient_with, AviProblem, DrWorkspace, IterRecord,
    IterationTrace, KktResiduals, Solution, SolverSettings, Status, TraceOptions,
};
pub use error::{Error, Result};
pub use gen::{quadratic_game_to_avi, random_avi, random_avi_with_point, GenSpec, QuadraticGame};
pub use linalg::{factor_general, factor_spd, Factorization, GeneralFactor, Matrix, SpdFactor};
pub use oracle::{brute_force_solve, OracleResult};
pub use qp::{qp_setup, qp_solve, QpResult, QpWorkspace};
