//! Exact reference solutions for small AVIs by enumerating active sets.
//!
//! For every index set `S` with `|S| ≤ n` and linearly independent rows
//! `A_S`, the reduced KKT system is solved and the candidate kept if it is
//! primal and dual feasible. Strong monotonicity makes the primal solution
//! unique, so every passing candidate has the same `x`.

use crate::avi::{kkt_active_solve, kkt_residuals, AviProblem};
use crate::error::{Error, Result};
use crate::gen::{random_avi, GenSpec};
use crate::linalg::{axpy, dot, norm2};

/// Enumeration guard.
pub const MAX_CONSTRAINTS: usize = 16;
/// Feasibility tolerance when filtering candidates.
pub const FEAS_TOL: f64 = 1e-9;
/// Threshold for strict complementarity and nondegeneracy.
pub const STRICT_TOL: f64 = 1e-6;
/// Projection-residual threshold for the rank filter.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub active_set: Vec<usize>,
    /// Every active multiplier and every inactive slack exceeds `1e-6`.
    pub strictly_complementary: bool,
    /// The KKT conditions hold at `(1e-9, 1e-9)`.
    pub certified: bool,
    /// How many enumerated sets produced a feasible candidate.
    pub passing_subsets: usize,
    pub min_active_multiplier: f64,
    pub min_inactive_slack: f64,
}

/// True when the rows listed in `set` are linearly independent, tested by
/// Gram-Schmidt with one reorthogonalization pass.
fn independent_rows(p: &AviProblem, set: &[usize]) -> bool {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(set.len());
    for &i in set {
        let row = p.a().row(i);
        let norm = norm2(row);
        let mut r = row.to_vec();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &r);
                axpy(-c, q, &mut r);
            }
        }
        let rn = norm2(&r);
        if rn <= RANK_TOL * norm || rn == 0.0 {
            return false;
        }
        r.iter_mut().for_each(|v| *v /= rn);
        basis.push(r);
    }
    true
}

struct Candidate {
    set: Vec<usize>,
    x: Vec<f64>,
    lambda: Vec<f64>,
    residual: f64,
}

/// Solves the AVI by exhaustive enumeration. Only for `m ≤ 16`.
pub fn brute_force_solve(p: &AviProblem) -> Result<OracleResult> {
    let (n, m) = (p.n(), p.m());
    if m > MAX_CONSTRAINTS {
        return Err(Error::TooLarge { m, limit: MAX_CONSTRAINTS });
    }
    p.check_monotone()?;

    let mut best: Option<Candidate> = None;
    let mut passing = 0usize;
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() as usize > n {
            continue;
        }
        let set: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        if !independent_rows(p, &set) {
            continue;
        }
        let Ok((x, lam_s)) = kkt_active_solve(p, &set) else {
            continue;
        };
        if lam_s.iter().any(|&l| l < -FEAS_TOL) {
            continue;
        }
        let ax = p.a().mul_vec(&x)?;
        if ax.iter().zip(p.b()).any(|(l, r)| r - l < -FEAS_TOL) {
            continue;
        }
        passing += 1;
        let mut lambda = vec![0.0; m];
        for (&i, &l) in set.iter().zip(&lam_s) {
            lambda[i] = l;
        }
        let residual = kkt_residuals(p, &x, &lambda)?.max();
        let better = match &best {
            None => true,
            Some(b) => residual < b.residual || (residual == b.residual && set < b.set),
        };
        if better {
            best = Some(Candidate { set, x, lambda, residual });
        }
    }

    let c = best.ok_or(Error::NoCertificate)?;
    let ax = p.a().mul_vec(&c.x)?;
    let min_active_multiplier = c.set.iter().map(|&i| c.lambda[i]).fold(f64::INFINITY, f64::min);
    let min_inactive_slack =
        (0..m).filter(|i| !c.set.contains(i)).map(|i| p.b()[i] - ax[i]).fold(f64::INFINITY, f64::min);
    let certified = kkt_residuals(p, &c.x, &c.lambda)?.within(FEAS_TOL, FEAS_TOL);
    Ok(OracleResult {
        x: c.x,
        lambda: c.lambda,
        active_set: c.set,
        strictly_complementary: min_active_multiplier > STRICT_TOL && min_inactive_slack > STRICT_TOL,
        certified,
        passing_subsets: passing,
        min_active_multiplier,
        min_inactive_slack,
    })
}

/// Draws instances starting at `spec.seed`, moving to the next seed until the
/// oracle certifies a strictly complementary, nondegenerate solution.
/// Returns the problem, its oracle result, and the seed that was used.
pub fn nondegenerate_instance(spec: &GenSpec, max_tries: usize) -> Result<(AviProblem, OracleResult, u64)> {
    for t in 0..max_tries as u64 {
        let seed = spec.seed + t;
        let p = random_avi(&spec.clone().with_seed(seed))?;
        match brute_force_solve(&p) {
            Ok(r) if r.certified && r.strictly_complementary => return Ok((p, r, seed)),
            Ok(_) | Err(Error::NoCertificate) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoCertificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::avi::check_solution;
    use crate::avi::fixtures::scalar;
    use crate::linalg::Matrix;
    use crate::linalg::{norm_inf, sub};
    use crate::qp::QpWorkspace;

    #[test]
    fn scalar_interior() {
        let r = brute_force_solve(&scalar(10.0)).unwrap();
        assert_eq!(r.x, vec![1.0]);
        assert!(r.active_set.is_empty());
        assert!(r.certified && r.strictly_complementary);
    }

    #[test]
    fn scalar_active() {
        let r = brute_force_solve(&scalar(0.25)).unwrap();
        assert!((r.x[0] - 0.25).abs() < 1e-15);
        assert!((r.lambda[0] - 1.5).abs() < 1e-15);
        assert_eq!(r.active_set, vec![0]);
    }

    #[test]
    fn too_large() {
        let p = crate::gen::random_avi(&GenSpec::new(3, 17, 0.5, 1)).unwrap();
        assert_eq!(brute_force_solve(&p), Err(Error::TooLarge { m: 17, limit: 16 }));
    }

    #[test]
    fn unique_passing_subset() {
        let mut strict = 0;
        for seed in 0..50 {
            let p = crate::gen::random_avi(&GenSpec::new(4, 10, 0.5, seed)).unwrap();
            let r = brute_force_solve(&p).unwrap();
            assert!(r.certified);
            assert!(check_solution(&p, &r.x, &r.lambda, 1e-9, 1e-9).unwrap());
            if r.strictly_complementary {
                strict += 1;
                assert_eq!(r.passing_subsets, 1, "seed {seed}");
            }
        }
        assert!(strict >= 40, "only {strict} strictly complementary instances");
    }

    #[test]
    fn agrees_with_qp_on_symmetric_problems() {
        for seed in 0..20 {
            let p = crate::gen::random_avi(&GenSpec::new(4, 12, 0.0, seed).with_regularization(0.1)).unwrap();
            let r = brute_force_solve(&p).unwrap();
            let y = QpWorkspace::new(p.h(), p.a(), p.b()).unwrap().solve(p.f(), false).unwrap().y;
            assert!(norm_inf(&sub(&r.x, &y)) <= 1e-9);
        }
    }

    #[test]
    fn filter_returns_strict_instances() {
        let (p, r, seed) = nondegenerate_instance(&GenSpec::new(3, 6, 0.5, 10), 50).unwrap();
        assert!(seed >= 10);
        assert!(r.strictly_complementary && r.certified);
        assert_eq!(brute_force_solve(&p).unwrap(), r);
    }

    #[test]
    fn rank_filter() {
        let p = AviProblem::new(
            Matrix::identity(2),
            vec![-1.0, -1.0],
            Matrix::from_rows(2, &[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            vec![0.5, 1.0, 0.5],
        )
        .unwrap();
        assert!(!independent_rows(&p, &[0, 1]));
        assert!(independent_rows(&p, &[0, 2]));
        let r = brute_force_solve(&p).unwrap();
        assert!((r.x[0] - 0.5).abs() < 1e-12 && (r.x[1] - 0.5).abs() < 1e-12);
        assert!(!r.strictly_complementary);
    }
}
