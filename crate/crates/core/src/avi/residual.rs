use super::AviProblem;
use crate::error::{check_len, Result};
use crate::linalg::{axpy, Matrix};
use crate::qp::QpWorkspace;

/// `Q`-weighted natural residual `R(z) = z − Π_{X,Q}(z − Q⁻¹(H z + f))`.
///
/// The weighted projection of `v = z − Q⁻¹(Hz + f)` minimizes
/// `½ xᵀQx − (Qv)ᵀx = ½ xᵀQx + (Hz + f − Qz)ᵀx` over `X`, so `Q⁻¹` is never
/// formed. `R(z) = 0` exactly at the solution.
pub fn natural_residual(p: &AviProblem, z: &[f64], q: &Matrix) -> Result<Vec<f64>> {
    check_len(p.n(), z.len())?;
    let mut ws = QpWorkspace::new(q, p.a(), p.b())?;
    let mut c = p.h().mul_vec(z)?;
    axpy(1.0, p.f(), &mut c);
    axpy(-1.0, &q.mul_vec(z)?, &mut c);
    let proj = ws.solve(&c, false)?.y;
    Ok(z.iter().zip(&proj).map(|(a, b)| a - b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::avi::fixtures::scalar;
    use crate::avi::{DrWorkspace, SolverSettings};
    use crate::gen::{random_avi, GenSpec};
    use crate::linalg::{norm2, norm_inf, sub};
    use crate::oracle::brute_force_solve;
    use crate::testutil::{random_vec, rng};

    #[test]
    fn zero_at_solution() {
        let p = random_avi(&GenSpec::new(4, 10, 0.5, 9)).unwrap();
        let x = brute_force_solve(&p).unwrap().x;
        let r = natural_residual(&p, &x, &Matrix::identity(4)).unwrap();
        assert!(norm2(&r) <= 1e-8, "{r:?}");
        let ws = DrWorkspace::new(&p, &SolverSettings::default()).unwrap();
        let r = natural_residual(&p, &x, ws.h_tilde()).unwrap();
        assert!(norm2(&r) <= 1e-8);
    }

    #[test]
    fn scalar_interior_projection() {
        let r = natural_residual(&scalar(10.0), &[0.0], &Matrix::identity(1)).unwrap();
        assert_eq!(r, vec![-2.0]);
    }

    #[test]
    fn weighted_by_h_tilde_is_qp_gap() {
        let mut rng = rng(101);
        for seed in 0..50 {
            let p = random_avi(&GenSpec::new(6, 30, 0.5, seed)).unwrap();
            let mut ws = DrWorkspace::new(&p, &SolverSettings::default()).unwrap();
            let z: Vec<f64> = random_vec(&mut rng, 6).iter().map(|v| 2.0 * v).collect();
            let direct = natural_residual(&p, &z, &ws.h_tilde().clone()).unwrap();
            let via_qp = ws.natural_residual(&z, false).unwrap();
            assert!(norm_inf(&sub(&direct, &via_qp)) <= 1e-10);
        }
    }
}
