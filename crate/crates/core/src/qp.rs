//! Warm-startable dual active-set solver for strictly convex QPs
//!
//! ```text
//!     minimize    ½ yᵀ H y + cᵀ y
//!     subject to  A y ≤ b
//! ```
//!
//! where `H` and `(A, b)` are fixed for the lifetime of a [`QpWorkspace`] and
//! only the linear term `c` changes between solves.
//!
//! With `H = RᵀR` (from the root-free factorization, `R = D^{1/2} Lᵀ`) the
//! substitution `w = R y + R⁻ᵀ c` turns the problem into the least-distance
//! problem `min ½‖w‖²  s.t.  M w ≤ d` with `M = A R⁻¹` and `d = b + M R⁻ᵀ c`.
//! `M` is computed once at setup; each solve only needs one triangular solve
//! to form `d`. The dual iteration keeps `λ ≥ 0` and maintains an `LDLᵀ`
//! factorization of the working-set Gram matrix `M_W M_Wᵀ`, which is updated
//! in place on every addition and removal and kept between solves so that a
//! warm start from the previous working set costs nothing to set up.

use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, factor_spd, norm2, norm_inf, Matrix, SpdFactor};

/// Relative threshold below which a candidate row is treated as linearly
/// dependent on the current working set.
pub const DEPENDENCE_TOL: f64 = 1e-10;
/// Dual feasibility tolerance of a returned result.
pub const EPS_DUAL: f64 = 1e-10;

/// Primal feasibility tolerance `1e-8·(1 + ‖b‖∞)`.
pub fn eps_primal(b: &[f64]) -> f64 {
    1e-8 * (1.0 + norm_inf(b))
}

/// Stationarity tolerance `1e-8·(1 + ‖c‖∞)`.
pub fn eps_stationarity(c: &[f64]) -> f64 {
    1e-8 * (1.0 + norm_inf(c))
}

/// Result of one QP solve.
#[derive(Clone, Debug, PartialEq)]
pub struct QpResult {
    /// Primal minimizer.
    pub y: Vec<f64>,
    /// Multipliers for all `m` constraints; zero off the active set.
    pub lambda: Vec<f64>,
    /// Working set at the solution, sorted ascending.
    pub active_set: Vec<usize>,
    /// Working-set changes (additions plus removals) performed by this solve.
    pub inner_iterations: usize,
}

/// `LDLᵀ` factorization of the Gram matrix of the working-set rows, in
/// working-set order. Row `i` of `l` holds the `i` strictly-lower entries.
#[derive(Clone, Debug, Default)]
struct GramFactor {
    l: Vec<Vec<f64>>,
    d: Vec<f64>,
}

impl GramFactor {
    fn clear(&mut self) {
        self.l.clear();
        self.d.clear();
    }

    /// Solves `L t = g` in place.
    fn forward(&self, t: &mut [f64]) {
        for i in 0..t.len() {
            let s = dot(&self.l[i], &t[..i]);
            t[i] -= s;
        }
    }

    /// Solves `Lᵀ x = t` in place.
    fn backward(&self, x: &mut [f64]) {
        for i in (0..x.len()).rev() {
            let xi = x[i];
            for (k, lik) in self.l[i].iter().enumerate() {
                x[k] -= lik * xi;
            }
        }
    }

    fn solve(&self, rhs: &mut [f64]) {
        self.forward(rhs);
        for (v, d) in rhs.iter_mut().zip(&self.d) {
            *v /= d;
        }
        self.backward(rhs);
    }

    /// Drops position `pos`; the trailing block absorbs the removed column
    /// through a rank-one update.
    fn remove(&mut self, pos: usize) {
        let d_removed = self.d.remove(pos);
        self.l.remove(pos);
        let mut w: Vec<f64> = self.l[pos..].iter_mut().map(|row| row.remove(pos)).collect();
        // L₂₂ D₂₂ L₂₂ᵀ + d_removed · w wᵀ, stable update (Gill, Golub, Murray, Saunders)
        let mut alpha = d_removed;
        for j in 0..w.len() {
            let jj = pos + j;
            let p = w[j];
            let d_old = self.d[jj];
            let d_new = d_old + alpha * p * p;
            let beta = p * alpha / d_new;
            alpha *= d_old / d_new;
            self.d[jj] = d_new;
            for (r, wr) in w.iter_mut().enumerate().skip(j + 1) {
                *wr -= p * self.l[pos + r][jj];
                self.l[pos + r][jj] += beta * *wr;
            }
        }
    }
}

/// Outcome of trying to append a row to the working set.
enum Push {
    Added,
    /// Row is (numerically) in the span of the working set; carries the
    /// coefficients `c` with `M_k ≈ M_Wᵀ c`.
    Dependent(Vec<f64>),
}

/// Fixed QP data, the Hessian factorization, and the mutable working set.
#[derive(Clone, Debug)]
pub struct QpWorkspace {
    hessian: Matrix,
    hessian_factor: SpdFactor,
    a: Matrix,
    b: Vec<f64>,
    a_norms: Vec<f64>,
    /// `M = A R⁻¹`, one transformed constraint per row.
    m_rows: Matrix,
    m_norms: Vec<f64>,
    working_set: Vec<usize>,
    gram: GramFactor,
    inner_iteration_counter: usize,
}

impl QpWorkspace {
    /// Factors the Hessian once and precomputes the transformed constraint rows.
    pub fn new(hessian: &Matrix, a: &Matrix, b: &[f64]) -> Result<Self> {
        let n = hessian.rows();
        if !hessian.is_square() {
            return Err(Error::DimensionMismatch { expected: n, found: hessian.cols() });
        }
        if a.rows() > 0 || a.cols() > 0 {
            check_len(n, a.cols())?;
        }
        check_len(a.rows(), b.len())?;
        let hessian_factor = factor_spd(hessian)?;
        let m = a.rows();
        let mut m_data = Vec::with_capacity(m * n);
        for i in 0..m {
            m_data.extend(hessian_factor.whiten(a.row(i))?);
        }
        let m_rows = Matrix::new(m, n, m_data)?;
        let m_norms = (0..m).map(|i| norm2(m_rows.row(i))).collect();
        let a_norms = (0..m).map(|i| norm2(a.row(i))).collect();
        Ok(QpWorkspace {
            hessian: hessian.clone(),
            hessian_factor,
            a: a.clone(),
            b: b.to_vec(),
            a_norms,
            m_rows,
            m_norms,
            working_set: Vec::new(),
            gram: GramFactor::default(),
            inner_iteration_counter: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.hessian.rows()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    pub fn hessian_factor(&self) -> &SpdFactor {
        &self.hessian_factor
    }

    pub fn constraints(&self) -> (&Matrix, &[f64]) {
        (&self.a, &self.b)
    }

    /// Current working set in insertion order.
    pub fn working_set(&self) -> &[usize] {
        &self.working_set
    }

    /// Working-set changes accumulated over all solves on this workspace.
    pub fn inner_iteration_counter(&self) -> usize {
        self.inner_iteration_counter
    }

    pub fn clear_working_set(&mut self) {
        self.working_set.clear();
        self.gram.clear();
    }

    /// Replaces the working set. Indices out of range or repeated are
    /// rejected; rows dependent on earlier entries are skipped.
    pub fn set_working_set(&mut self, set: &[usize]) -> Result<()> {
        if self.working_set == set {
            return Ok(());
        }
        let m = self.num_constraints();
        let mut seen = vec![false; m];
        for &i in set {
            if i >= m || seen[i] {
                return Err(Error::InvalidInput(format!("bad working-set index {i}")));
            }
            seen[i] = true;
        }
        self.clear_working_set();
        for &i in set {
            if let Push::Added = self.try_push(i) {
                self.working_set.push(i);
            }
        }
        Ok(())
    }

    fn try_push(&mut self, k: usize) -> Push {
        let mk = self.m_rows.row(k);
        let nw = self.working_set.len();
        let g: Vec<f64> = self.working_set.iter().map(|&i| dot(self.m_rows.row(i), mk)).collect();
        let mut t = g;
        self.gram.forward(&mut t);
        let l_new: Vec<f64> = t.iter().zip(&self.gram.d).map(|(ti, di)| ti / di).collect();
        let mut coeffs = l_new.clone();
        self.gram.backward(&mut coeffs);
        let mut resid = mk.to_vec();
        for (c, &i) in coeffs.iter().zip(&self.working_set) {
            axpy(-c, self.m_rows.row(i), &mut resid);
        }
        let r = norm2(&resid);
        if r <= DEPENDENCE_TOL * self.m_norms[k] || r == 0.0 {
            return Push::Dependent(coeffs);
        }
        debug_assert_eq!(l_new.len(), nw);
        self.gram.l.push(l_new);
        self.gram.d.push(r * r);
        Push::Added
    }

    fn remove_at(&mut self, pos: usize) {
        self.working_set.remove(pos);
        self.gram.remove(pos);
    }

    /// Solves the QP for linear term `c`. A warm solve starts from the
    /// current working set; a cold one from the empty set. On return the
    /// workspace holds the final working set.
    pub fn solve(&mut self, c: &[f64], warm: bool) -> Result<QpResult> {
        let n = self.dim();
        let m = self.num_constraints();
        check_len(n, c.len())?;
        if !warm {
            self.clear_working_set();
        }

        let v = self.hessian_factor.whiten(c)?;
        let d: Vec<f64> = (0..m).map(|i| self.b[i] + dot(self.m_rows.row(i), &v)).collect();
        let eps_p = eps_primal(&self.b);
        let cap = 100 * (m + n);
        let stall_limit = m + n;

        let mut lam: Vec<f64> = vec![0.0; self.working_set.len()];
        let mut changes = 0usize;
        let mut iters = 0usize;
        let mut stall = 0usize;
        let mut bland = false;
        let mut best_obj = f64::NEG_INFINITY;
        let mut w = vec![0.0; n];

        loop {
            iters += 1;
            if iters > cap {
                self.inner_iteration_counter += changes;
                return Err(Error::CycleLimit { limit: cap });
            }

            // equality-constrained multipliers for the working set: G λ* = -d_W
            let mut lam_star: Vec<f64> = self.working_set.iter().map(|&i| -d[i]).collect();
            self.gram.solve(&mut lam_star);
            let neg_tol = 1e-12 * (1.0 + norm_inf(&lam_star));

            if lam_star.iter().any(|&l| l < -neg_tol) {
                // partial step towards λ*, dropping the first multiplier to hit zero
                let mut block: Option<(usize, f64)> = None;
                for (pos, (&ls, &l)) in lam_star.iter().zip(&lam).enumerate() {
                    let p = ls - l;
                    if p < 0.0 && ls < -neg_tol || p < 0.0 && l == 0.0 {
                        let ratio = (l / -p).max(0.0);
                        let better = match block {
                            None => true,
                            Some((bp, br)) => {
                                ratio < br || (ratio == br && self.working_set[pos] < self.working_set[bp])
                            }
                        };
                        if better {
                            block = Some((pos, ratio));
                        }
                    }
                }
                let (pos, alpha) = block.expect("a negative multiplier always blocks");
                for (l, ls) in lam.iter_mut().zip(&lam_star) {
                    *l = (*l + alpha * (ls - *l)).max(0.0);
                }
                lam.remove(pos);
                self.remove_at(pos);
                changes += 1;
                continue;
            }

            lam = lam_star.iter().map(|l| l.max(0.0)).collect();
            w.iter_mut().for_each(|x| *x = 0.0);
            for (l, &i) in lam.iter().zip(&self.working_set) {
                axpy(-l, self.m_rows.row(i), &mut w);
            }

            // stall detection on the dual objective -½‖w‖² - d_Wᵀλ
            let obj = -0.5 * dot(&w, &w) - lam.iter().zip(&self.working_set).map(|(l, &i)| l * d[i]).sum::<f64>();
            if obj > best_obj + 1e-14 * (1.0 + obj.abs()) {
                best_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall >= stall_limit {
                    bland = true;
                }
            }

            // most violated constraint outside the working set
            let mut in_w = vec![false; m];
            for &i in &self.working_set {
                in_w[i] = true;
            }
            let mut cand: Option<(usize, f64)> = None;
            for i in (0..m).filter(|&i| !in_w[i]) {
                let viol = dot(self.m_rows.row(i), &w) - d[i];
                if viol > eps_p {
                    if bland {
                        cand = Some((i, viol));
                        break;
                    }
                    let scaled = if self.a_norms[i] > 0.0 { viol / self.a_norms[i] } else { viol };
                    if cand.is_none_or(|(_, s)| scaled > s) {
                        cand = Some((i, scaled));
                    }
                }
            }
            let Some((k, _)) = cand else { break };

            let mut lam_k = 0.0;
            loop {
                match self.try_push(k) {
                    Push::Added => {
                        self.working_set.push(k);
                        lam.push(lam_k);
                        changes += 1;
                        break;
                    }
                    Push::Dependent(coeffs) => {
                        // pure dual step: λ_W -= t·c, λ_k += t, primal point unchanged
                        let mut block: Option<(usize, f64)> = None;
                        for (pos, (&ci, &li)) in coeffs.iter().zip(&lam).enumerate() {
                            if ci > 1e-14 {
                                let ratio = li / ci;
                                if block.is_none_or(|(_, r)| ratio < r) {
                                    block = Some((pos, ratio));
                                }
                            }
                        }
                        let Some((pos, t)) = block else {
                            self.inner_iteration_counter += changes;
                            return Err(Error::Infeasible);
                        };
                        for (l, ci) in lam.iter_mut().zip(&coeffs) {
                            *l = (*l - t * ci).max(0.0);
                        }
                        lam_k += t;
                        lam.remove(pos);
                        self.remove_at(pos);
                        changes += 1;
                    }
                }
            }
        }

        // map back: y = R⁻¹ (w - v)
        let wv: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - b).collect();
        let y = self.hessian_factor.unwhiten(&wv)?;
        let mut lambda = vec![0.0; m];
        for (l, &i) in lam.iter().zip(&self.working_set) {
            lambda[i] = *l;
        }
        let mut active_set = self.working_set.clone();
        active_set.sort_unstable();
        self.inner_iteration_counter += changes;
        Ok(QpResult { y, lambda, active_set, inner_iterations: changes })
    }

    /// Stationarity, feasibility, sign and complementarity residuals of `r`
    /// for linear term `c`, as `(stationarity, primal, dual, complementarity)`.
    pub fn kkt_residuals(&self, c: &[f64], r: &QpResult) -> (f64, f64, f64, f64) {
        let mut g = self.hessian.mul_vec(&r.y).expect("dimensions checked at setup");
        axpy(1.0, c, &mut g);
        let at = self.a.tr_mul_vec(&r.lambda).expect("dimensions checked at setup");
        axpy(1.0, &at, &mut g);
        let ay = self.a.mul_vec(&r.y).expect("dimensions checked at setup");
        let mut primal: f64 = 0.0;
        let mut comp: f64 = 0.0;
        for ((bi, ai), li) in self.b.iter().zip(&ay).zip(&r.lambda) {
            let slack = bi - ai;
            primal = primal.max(-slack);
            comp = comp.max((li * slack).abs());
        }
        let dual = r.lambda.iter().fold(0.0f64, |acc, &l| acc.max(-l));
        (norm_inf(&g), primal.max(0.0), dual, comp)
    }
}

/// Convenience wrapper: one-shot setup.
pub fn qp_setup(hessian: &Matrix, a: &Matrix, b: &[f64]) -> Result<QpWorkspace> {
    QpWorkspace::new(hessian, a, b)
}

/// Convenience wrapper around [`QpWorkspace::solve`].
pub fn qp_solve(ws: &mut QpWorkspace, c: &[f64], warm: bool) -> Result<QpResult> {
    ws.solve(c, warm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{factor_general, sub, Factorization};
    use crate::testutil::{random_matrix, random_spd, random_vec, rng};

    fn scalar_ws(b: f64) -> QpWorkspace {
        let h = Matrix::from_rows(1, &[vec![4.0]]).unwrap();
        let a = Matrix::from_rows(1, &[vec![1.0]]).unwrap();
        QpWorkspace::new(&h, &a, &[b]).unwrap()
    }

    fn assert_certificate(ws: &QpWorkspace, c: &[f64], r: &QpResult) {
        let (_, b) = ws.constraints();
        let (st, pr, du, co) = ws.kkt_residuals(c, r);
        assert!(st <= eps_stationarity(c), "stationarity {st}");
        assert!(pr <= eps_primal(b), "primal {pr}");
        assert!(du <= EPS_DUAL, "dual {du}");
        assert!(co <= 1e-8, "complementarity {co}");
        for (i, &l) in r.lambda.iter().enumerate() {
            if !r.active_set.contains(&i) {
                assert_eq!(l, 0.0);
            }
        }
    }

    /// Enumerates every working set, solves the equality-constrained KKT
    /// system with LU, and keeps the candidate satisfying all KKT conditions.
    fn enumerate_qp(h: &Matrix, c: &[f64], a: &Matrix, b: &[f64]) -> Vec<f64> {
        let n = h.rows();
        let m = a.rows();
        let mut found: Option<Vec<f64>> = None;
        for mask in 0u32..(1 << m) {
            let set: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            if set.len() > n {
                continue;
            }
            let k = set.len();
            let kkt = Matrix::from_fn(n + k, n + k, |i, j| match (i < n, j < n) {
                (true, true) => h[(i, j)],
                (true, false) => a[(set[j - n], i)],
                (false, true) => a[(set[i - n], j)],
                (false, false) => 0.0,
            });
            let Ok(f) = factor_general(&kkt) else { continue };
            let mut rhs: Vec<f64> = c.iter().map(|v| -v).collect();
            rhs.extend(set.iter().map(|&i| b[i]));
            let sol = f.solve(&rhs).unwrap();
            let (x, lam) = sol.split_at(n);
            let ax = a.mul_vec(x).unwrap();
            let feasible = ax.iter().zip(b).all(|(l, r)| l <= &(r + 1e-9));
            if feasible && lam.iter().all(|&l| l >= -1e-9) {
                found = Some(x.to_vec());
            }
        }
        found.expect("strictly convex feasible QP has a KKT point")
    }

    #[test]
    fn setup_identity() {
        let a = Matrix::from_rows(2, &[vec![1.0, 0.0]]).unwrap();
        let ws = QpWorkspace::new(&Matrix::identity(2), &a, &[1.0]).unwrap();
        assert!(ws.working_set().is_empty());
        assert_eq!(ws.hessian_factor().pivots(), vec![1.0, 1.0]);
    }

    #[test]
    fn setup_diagonal_factor() {
        let a = Matrix::from_rows(2, &[vec![1.0, 1.0], vec![-3.0, 2.0]]).unwrap();
        let ws = QpWorkspace::new(&Matrix::diagonal(&[4.0, 4.0]), &a, &[0.0, 1.0]).unwrap();
        assert_eq!(ws.hessian_factor().solve(&[4.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn setup_random_roundtrip() {
        let mut rng = rng(3);
        let h = random_spd(&mut rng, 5, 0.5);
        let a = random_matrix(&mut rng, 50, 5);
        let b = vec![1.0; 50];
        let ws = QpWorkspace::new(&h, &a, &b).unwrap();
        let err = ws.hessian_factor().reconstruct().sub(&h).unwrap().max_abs();
        assert!(err <= 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn setup_rejects_indefinite() {
        let h = Matrix::from_rows(2, &[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let r = QpWorkspace::new(&h, &Matrix::zeros(0, 2), &[]);
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn scalar_interior() {
        let mut ws = scalar_ws(10.0);
        let r = ws.solve(&[-2.0], false).unwrap();
        assert!((r.y[0] - 0.5).abs() < 1e-15);
        assert!(r.active_set.is_empty());
        assert_eq!(r.lambda, vec![0.0]);
    }

    #[test]
    fn scalar_active() {
        let mut ws = scalar_ws(0.25);
        let r = ws.solve(&[-2.0], false).unwrap();
        assert!((r.y[0] - 0.25).abs() < 1e-14);
        assert_eq!(r.active_set, vec![0]);
        assert!((r.lambda[0] - 1.0).abs() < 1e-14);
        assert_eq!(ws.working_set(), &[0]);
    }

    #[test]
    fn matches_enumeration_oracle() {
        let mut rng = rng(41);
        for _ in 0..20 {
            let h = random_spd(&mut rng, 2, 0.1);
            let a = random_matrix(&mut rng, 8, 2);
            let x0 = random_vec(&mut rng, 2);
            let b: Vec<f64> = a.mul_vec(&x0).unwrap().iter().map(|v| v + 0.5).collect();
            let c: Vec<f64> = random_vec(&mut rng, 2).iter().map(|v| 3.0 * v).collect();
            let mut ws = QpWorkspace::new(&h, &a, &b).unwrap();
            let r = ws.solve(&c, false).unwrap();
            assert_certificate(&ws, &c, &r);
            let oracle = enumerate_qp(&h, &c, &a, &b);
            assert!(norm_inf(&sub(&r.y, &oracle)) <= 1e-8, "{:?} vs {:?}", r.y, oracle);
        }
    }

    #[test]
    fn infeasible_detected() {
        // x ≤ -1 and -x ≤ -1
        let a = Matrix::from_rows(1, &[vec![1.0], vec![-1.0]]).unwrap();
        let mut ws = QpWorkspace::new(&Matrix::identity(1), &a, &[-1.0, -1.0]).unwrap();
        assert_eq!(ws.solve(&[0.0], false), Err(Error::Infeasible));
    }

    #[test]
    fn dependent_rows_are_swapped_not_stacked() {
        // three constraints through one point in 1D; only one can be in the working set
        let a = Matrix::from_rows(1, &[vec![1.0], vec![2.0], vec![0.5]]).unwrap();
        let mut ws = QpWorkspace::new(&Matrix::identity(1), &a, &[1.0, 2.0, 0.5]).unwrap();
        let c = [-5.0];
        let r = ws.solve(&c, false).unwrap();
        assert!((r.y[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.active_set.len(), 1);
        assert_certificate(&ws, &c, &r);
    }

    #[test]
    fn warm_and_cold_agree() {
        let mut rng = rng(8);
        for _ in 0..30 {
            let h = random_spd(&mut rng, 6, 0.2);
            let a = random_matrix(&mut rng, 40, 6);
            let b: Vec<f64> = (0..40).map(|_| 0.3).collect();
            let mut warm = QpWorkspace::new(&h, &a, &b).unwrap();
            let mut cold = warm.clone();
            for _ in 0..4 {
                let c: Vec<f64> = random_vec(&mut rng, 6).iter().map(|v| 4.0 * v).collect();
                let rw = warm.solve(&c, true).unwrap();
                let rc = cold.solve(&c, false).unwrap();
                assert_certificate(&warm, &c, &rw);
                assert!(norm_inf(&sub(&rw.y, &rc.y)) <= 1e-8);
            }
        }
    }

    #[test]
    fn repeated_warm_solve_is_free() {
        let mut rng = rng(19);
        let h = random_spd(&mut rng, 5, 0.2);
        let a = random_matrix(&mut rng, 30, 5);
        let b = vec![0.2; 30];
        let c: Vec<f64> = random_vec(&mut rng, 5).iter().map(|v| 5.0 * v).collect();
        let mut ws = QpWorkspace::new(&h, &a, &b).unwrap();
        let first = ws.solve(&c, false).unwrap();
        assert!(first.inner_iterations > 0);
        let second = ws.solve(&c, true).unwrap();
        assert_eq!(second.inner_iterations, 0);
        assert_eq!(first.active_set, second.active_set);
        assert_eq!(ws.inner_iteration_counter(), first.inner_iterations);
    }

    #[test]
    fn warm_start_saves_changes_on_nearby_parameters() {
        let mut rng = rng(77);
        let mut fewer = 0;
        let mut total = 0;
        while total < 50 {
            let h = random_spd(&mut rng, 6, 0.5);
            let a = random_matrix(&mut rng, 60, 6);
            let b = vec![0.1; 60];
            let c1: Vec<f64> = random_vec(&mut rng, 6).iter().map(|v| 5.0 * v).collect();
            let dir = random_vec(&mut rng, 6);
            let c2: Vec<f64> = c1.iter().zip(&dir).map(|(c, d)| c + 1e-7 * d).collect();
            let mut ws = QpWorkspace::new(&h, &a, &b).unwrap();
            let r1 = ws.solve(&c1, false).unwrap();
            let mut fresh = ws.clone();
            let rc = fresh.solve(&c2, false).unwrap();
            if r1.active_set != rc.active_set || r1.active_set.is_empty() {
                continue; // the oracle says the set changed; not a continuity instance
            }
            let rw = ws.solve(&c2, true).unwrap();
            total += 1;
            if rw.inner_iterations < rc.inner_iterations {
                fewer += 1;
            }
        }
        assert!(fewer * 10 >= total * 9, "{fewer}/{total}");
    }

    #[test]
    fn set_working_set_validates() {
        let mut ws = scalar_ws(1.0);
        assert!(ws.set_working_set(&[3]).is_err());
        assert!(ws.set_working_set(&[0, 0]).is_err());
        ws.set_working_set(&[0]).unwrap();
        assert_eq!(ws.working_set(), &[0]);
    }

    #[test]
    fn unconstrained_problem() {
        let h = Matrix::from_rows(2, &[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let mut ws = QpWorkspace::new(&h, &Matrix::zeros(0, 2), &[]).unwrap();
        let r = ws.solve(&[1.0, -1.0], true).unwrap();
        let expect = factor_spd(&h).unwrap().solve(&[-1.0, 1.0]).unwrap();
        assert!(norm_inf(&sub(&r.y, &expect)) < 1e-14);
    }
}
