//! Dense linear algebra for the solver.
//!
//! Everything here is small and dense: row-major [`Matrix`], a root-free
//! symmetric factorization [`SpdFactor`] (`M = L D Lᵀ`), and an LU
//! factorization with partial pivoting [`GeneralFactor`]. Both factor types
//! are immutable and can be reused for any number of right-hand sides.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{check_len, Error, Result};

/// Relative pivot threshold for [`SpdFactor`], scaled by `trace(M)/n`.
pub const SPD_PIVOT_TOL: f64 = 1e-12;
/// Relative pivot threshold for [`GeneralFactor`], scaled by the largest row norm.
pub const LU_PIVOT_TOL: f64 = 1e-12;

/// Dense row-major matrix of finite reals.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Matrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `self · x`
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `selfᵀ · x`
    pub fn tr_mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, x.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                axpy(xi, self.row(i), &mut out);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                axpy(a, other.row(k), dst);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Symmetric part `½(M + Mᵀ)`. The result is exactly symmetric.
    pub fn sym(&self) -> Matrix {
        assert!(self.is_square(), "sym() needs a square matrix");
        // addition commutes, so entries (i, j) and (j, i) round identically
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.rows, other.rows)?;
        check_len(self.cols, other.cols)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.rows, other.rows)?;
        check_len(self.cols, other.cols)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self + shift·I`
    pub fn shift_diagonal(&self, shift: f64) -> Matrix {
        assert!(self.is_square(), "shift_diagonal() needs a square matrix");
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += shift;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    /// Largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Submatrix formed by the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// y += a * x
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[inline]
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Anything that can solve `M x = r` for a fixed, already factored `M`.
pub trait Factorization {
    fn dim(&self) -> usize;

    fn solve_in_place(&self, rhs: &mut [f64]) -> Result<()>;

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// `M = L D Lᵀ` for a symmetric positive definite `M`.
///
/// `L` is unit lower triangular and stored in the strict lower triangle of
/// `factors`; `D` lives on its diagonal.
#[derive(Clone, Debug)]
pub struct SpdFactor {
    n: usize,
    factors: Matrix,
}

/// Factors a symmetric positive definite matrix without square roots.
///
/// Fails with [`Error::NotPositiveDefinite`] as soon as a pivot drops to or
/// below `1e-12 · trace(M)/n`.
pub fn factor_spd(m: &Matrix) -> Result<SpdFactor> {
    let n = m.rows();
    let eps_pd = if n == 0 { 0.0 } else { SPD_PIVOT_TOL * m.trace() / n as f64 };
    ldlt(m, eps_pd)
}

/// True when every `LDLᵀ` pivot of the symmetric matrix `m` is strictly positive.
pub fn is_positive_definite(m: &Matrix) -> bool {
    ldlt(m, 0.0).is_ok()
}

fn ldlt(m: &Matrix, eps_pd: f64) -> Result<SpdFactor> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let n = m.rows();
    let sym_tol = 1e-12 * m.frobenius_norm();
    if !m.is_symmetric(sym_tol) {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    let mut f = m.clone();
    for j in 0..n {
        let mut d = f[(j, j)];
        for k in 0..j {
            let l = f[(j, k)];
            d -= l * l * f[(k, k)];
        }
        if d <= eps_pd || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        f[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = f[(i, j)];
            for k in 0..j {
                s -= f[(i, k)] * f[(j, k)] * f[(k, k)];
            }
            f[(i, j)] = s / d;
        }
    }
    // clear the upper triangle so `factors` only holds L and D
    for i in 0..n {
        for j in (i + 1)..n {
            f[(i, j)] = 0.0;
        }
    }
    Ok(SpdFactor { n, factors: f })
}

impl SpdFactor {
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.factors[(i, i)]).collect()
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> f64 {
        self.factors[(i, j)]
    }

    fn forward(&self, x: &mut [f64]) {
        for i in 0..self.n {
            let s: f64 = (0..i).map(|k| self.l(i, k) * x[k]).sum();
            x[i] -= s;
        }
    }

    fn backward(&self, x: &mut [f64]) {
        for i in (0..self.n).rev() {
            let s: f64 = ((i + 1)..self.n).map(|k| self.l(k, i) * x[k]).sum();
            x[i] -= s;
        }
    }

    /// `D^{-1/2} L⁻¹ r`, i.e. `R⁻ᵀ r` for `M = RᵀR` with `R = D^{1/2} Lᵀ`.
    pub fn whiten(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, r.len())?;
        let mut x = r.to_vec();
        self.forward(&mut x);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi /= self.factors[(i, i)].sqrt();
        }
        Ok(x)
    }

    /// `L⁻ᵀ D^{-1/2} w`, i.e. `R⁻¹ w`. Inverse of the change of variables `u = R y`.
    pub fn unwhiten(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, w.len())?;
        let mut x = w.to_vec();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi /= self.factors[(i, i)].sqrt();
        }
        self.backward(&mut x);
        Ok(x)
    }

    /// Rebuilds `L D Lᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.n;
        Matrix::from_fn(n, n, |i, j| {
            let lim = i.min(j);
            let mut s = 0.0;
            for k in 0..=lim {
                let li = if k == i { 1.0 } else { self.l(i, k) };
                let lj = if k == j { 1.0 } else { self.l(j, k) };
                s += li * self.factors[(k, k)] * lj;
            }
            s
        })
    }
}

impl Factorization for SpdFactor {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        self.forward(x);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi /= self.factors[(i, i)];
        }
        self.backward(x);
        Ok(())
    }
}

/// `P M = L U` with partial (row) pivoting.
#[derive(Clone, Debug)]
pub struct GeneralFactor {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
}

/// Factors a general square matrix by Gaussian elimination with partial pivoting.
///
/// Reports [`Error::Singular`] when the best available pivot has magnitude at
/// most `1e-12 ·` (largest absolute row sum of `M`).
pub fn factor_general(m: &Matrix) -> Result<GeneralFactor> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let n = m.rows();
    let tol = LU_PIVOT_TOL * m.inf_norm();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, pmax) =
            (k..n).map(|i| (i, lu[(i, k)].abs())).fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= tol {
            return Err(Error::Singular { index: k, pivot: pmax });
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l != 0.0 {
                for j in (k + 1)..n {
                    lu[(i, j)] -= l * lu[(k, j)];
                }
            }
        }
    }
    Ok(GeneralFactor { n, lu, perm })
}

impl Factorization for GeneralFactor {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        let n = self.n;
        let rhs: Vec<f64> = self.perm.iter().map(|&p| x[p]).collect();
        x.copy_from_slice(&rhs);
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|k| self.lu[(i, k)] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(())
    }
}
