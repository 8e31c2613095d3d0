use super::AviProblem;
use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, factor_general, norm_inf, Factorization, Matrix};

/// Scaled violations of the AVI KKT conditions at a point `(x, λ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KktResiduals {
    /// `‖H x + f + Aᵀ λ‖∞ / (1 + ‖f‖∞)`
    pub stationarity: f64,
    /// `max(0, max_i (A_i x − b_i)) / (1 + ‖b‖∞)`
    pub primal: f64,
    /// `max(0, −min_i λ_i)`
    pub dual: f64,
    /// `max_i |λ_i (b_i − A_i x)| / (1 + ‖b‖∞)`
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.primal).max(self.dual).max(self.complementarity)
    }

    pub fn within(&self, eps_primal: f64, eps_dual: f64) -> bool {
        self.stationarity <= eps_dual
            && self.primal <= eps_primal
            && self.dual <= eps_dual
            && self.complementarity <= eps_primal
    }
}

pub fn kkt_residuals(p: &AviProblem, x: &[f64], lambda: &[f64]) -> Result<KktResiduals> {
    check_len(p.n(), x.len())?;
    check_len(p.m(), lambda.len())?;
    let mut g = p.h().mul_vec(x)?;
    axpy(1.0, p.f(), &mut g);
    axpy(1.0, &p.a().tr_mul_vec(lambda)?, &mut g);
    let ax = p.a().mul_vec(x)?;
    let b_scale = 1.0 + norm_inf(p.b());
    let mut primal = 0.0f64;
    let mut comp = 0.0f64;
    let mut dual = 0.0f64;
    for i in 0..p.m() {
        let slack = p.b()[i] - ax[i];
        primal = primal.max(-slack);
        comp = comp.max((lambda[i] * slack).abs());
        dual = dual.max(-lambda[i]);
    }
    Ok(KktResiduals {
        stationarity: norm_inf(&g) / (1.0 + norm_inf(p.f())),
        primal: primal / b_scale,
        dual,
        complementarity: comp / b_scale,
    })
}

/// True iff `(x, λ)` satisfies the AVI KKT conditions at the given tolerances.
pub fn check_solution(p: &AviProblem, x: &[f64], lambda: &[f64], eps_primal: f64, eps_dual: f64) -> Result<bool> {
    Ok(kkt_residuals(p, x, lambda)?.within(eps_primal, eps_dual))
}

/// Solves the saddle-point system
///
/// ```text
///     [ H     A_Sᵀ ] [ x   ]   [ -f  ]
///     [ A_S   0    ] [ λ_S ] = [ b_S ]
/// ```
///
/// for the index set `act`, returning `x` and the multipliers on `act` in the
/// given order. Fails with [`Error::Singular`] when the block matrix is rank
/// deficient, which includes `|act| > n`.
pub fn kkt_active_solve(p: &AviProblem, act: &[usize]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = p.n();
    let k = act.len();
    if let Some(&bad) = act.iter().find(|&&i| i >= p.m()) {
        return Err(Error::InvalidInput(format!("active index {bad} out of range")));
    }
    if k > n {
        return Err(Error::Singular { index: n, pivot: 0.0 });
    }
    let (h, a) = (p.h(), p.a());
    let kkt = Matrix::from_fn(n + k, n + k, |i, j| match (i < n, j < n) {
        (true, true) => h[(i, j)],
        (true, false) => a[(act[j - n], i)],
        (false, true) => a[(act[i - n], j)],
        (false, false) => 0.0,
    });
    let factor = factor_general(&kkt)?;
    let mut rhs: Vec<f64> = p.f().iter().map(|v| -v).collect();
    rhs.extend(act.iter().map(|&i| p.b()[i]));
    factor.solve_in_place(&mut rhs)?;
    let lam = rhs.split_off(n);
    Ok((rhs, lam))
}
