//! Problem generators.
//!
//! [`random_avi`] draws the random family
//!
//! ```text
//!     H = (1 − γ) MsᵀMs / ‖MsᵀMs‖_F + γ (Maᵀ − Ma) / ‖Maᵀ − Ma‖_F + r·I
//! ```
//!
//! with `Ms`, `Ma`, `A` and `f` standard normal, and `b = A x₀ + u` for a
//! standard normal `x₀` and `u_i ~ U[0.1, 1.1)`, so that `x₀` is strictly
//! feasible.
//!
//! The stream is ChaCha8 seeded with `seed_from_u64(seed)`; normals come from
//! `rand_distr::StandardNormal` (ziggurat). Draw order is `Ms`, `Ma`, `A`
//! (all row-major), then `x₀`, `u`, and `f`. Changing any of this changes
//! every generated instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::avi::AviProblem;
use crate::error::{check_len, Error, Result};
use crate::linalg::{factor_spd, Matrix};

/// Bumped whenever the generated stream changes.
pub const GENERATOR_VERSION: &str = "chacha8-ziggurat-v1";

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    /// Weight of the skew-symmetric part, in `[0, 1]`.
    pub gamma_asym: f64,
    pub seed: u64,
    /// Identity shift added after the two normalized terms.
    pub regularization: f64,
}

impl GenSpec {
    pub fn new(n: usize, m: usize, gamma_asym: f64, seed: u64) -> Self {
        GenSpec { n, m, gamma_asym, seed, regularization: 0.0 }
    }

    pub fn with_regularization(mut self, regularization: f64) -> Self {
        self.regularization = regularization;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma_asym) {
            return Err(Error::InvalidInput(format!("gamma_asym {} outside [0, 1]", self.gamma_asym)));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::InvalidInput(format!("regularization {} must be >= 0", self.regularization)));
        }
        Ok(())
    }
}

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `M / ‖M‖_F`, or the zero matrix when `M = 0` (e.g. the skew part for n = 1).
fn normalized(m: Matrix) -> Matrix {
    let norm = m.frobenius_norm();
    if norm > 0.0 {
        m.scale(1.0 / norm)
    } else {
        m
    }
}

/// The two unit-norm summands `(MsᵀMs/‖·‖, (Maᵀ−Ma)/‖·‖)` and the rest of
/// the draw.
struct Draw {
    sym: Matrix,
    skew: Matrix,
    a: Matrix,
    x0: Vec<f64>,
    b: Vec<f64>,
    f: Vec<f64>,
}

fn draw(spec: &GenSpec) -> Draw {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let ms = normal_matrix(&mut rng, n, n);
    let ma = normal_matrix(&mut rng, n, n);
    let a = normal_matrix(&mut rng, spec.m, n);
    let x0: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let ax = a.mul_vec(&x0).expect("shapes match");
    let b = ax.iter().map(|v| v + 0.1 + rng.random::<f64>()).collect();
    let f = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let sym = normalized(ms.transpose().mul(&ms).expect("square").sym());
    let skew = normalized(ma.transpose().sub(&ma).expect("square"));
    Draw { sym, skew, a, x0, b, f }
}

/// Random strongly monotone AVI; see the module docs for the distribution.
pub fn random_avi(spec: &GenSpec) -> Result<AviProblem> {
    random_avi_with_point(spec).map(|(p, _)| p)
}

/// Like [`random_avi`], also returning the strictly feasible point `x₀`.
pub fn random_avi_with_point(spec: &GenSpec) -> Result<(AviProblem, Vec<f64>)> {
    spec.validate()?;
    let d = draw(spec);
    let g = spec.gamma_asym;
    let h = d.sym.scale(1.0 - g).add(&d.skew.scale(g))?.shift_diagonal(spec.regularization);
    if factor_spd(&h.add(&h.transpose())?).is_err() {
        return Err(Error::AssumptionViolated(format!(
            "H + Hᵀ is not positive definite (gamma_asym = {g}, regularization = {})",
            spec.regularization
        )));
    }
    let p = AviProblem::new(h, d.f, d.a, d.b)?;
    Ok((p, d.x0))
}

/// The unit-Frobenius-norm summands of `H` before weighting.
pub fn normalized_summands(spec: &GenSpec) -> Result<(Matrix, Matrix)> {
    spec.validate()?;
    let d = draw(spec);
    Ok((d.sym, d.skew))
}

/// A game where player `i` minimizes
/// `½ x_iᵀ Q_ii x_i + Σ_{j≠i} x_iᵀ Q_ij x_j + q_iᵀ x_i` subject to shared
/// constraints `A x ≤ b` on the stacked decision `x = (x_1, …, x_N)`.
#[derive(Clone, Debug)]
pub struct QuadraticGame {
    dims: Vec<usize>,
    blocks: Vec<Vec<Matrix>>,
    q: Vec<Vec<f64>>,
    a: Matrix,
    b: Vec<f64>,
}

impl QuadraticGame {
    /// `blocks[i][j]` is `Q_ij` (`n_i × n_j`), `q[i]` has length `n_i`, and
    /// `a` has one column per stacked decision variable.
    pub fn new(blocks: Vec<Vec<Matrix>>, q: Vec<Vec<f64>>, a: Matrix, b: Vec<f64>) -> Result<Self> {
        let players = blocks.len();
        if players == 0 {
            return Err(Error::InvalidInput("game needs at least one player".into()));
        }
        check_len(players, q.len())?;
        let dims: Vec<usize> = q.iter().map(Vec::len).collect();
        for (i, row) in blocks.iter().enumerate() {
            check_len(players, row.len())?;
            for (j, blk) in row.iter().enumerate() {
                check_len(dims[i], blk.rows())?;
                check_len(dims[j], blk.cols())?;
            }
        }
        check_len(dims.iter().sum(), a.cols())?;
        check_len(a.rows(), b.len())?;
        Ok(QuadraticGame { dims, blocks, q, a, b })
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The pseudo-gradient matrix: block row `i` is `[Q_i1 … sym(Q_ii) … Q_iN]`.
    pub fn pseudo_gradient(&self) -> Matrix {
        let total: usize = self.dims.iter().sum();
        let offsets: Vec<usize> = self
            .dims
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let mut h = Matrix::zeros(total, total);
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, blk) in row.iter().enumerate() {
                let blk = if i == j { blk.sym() } else { blk.clone() };
                for r in 0..blk.rows() {
                    for c in 0..blk.cols() {
                        h[(offsets[i] + r, offsets[j] + c)] = blk[(r, c)];
                    }
                }
            }
        }
        h
    }
}

/// Variational-equilibrium AVI of a quadratic game: `H` is the pseudo-gradient
/// matrix, `f` the stacked `q_i`, and `(A, b)` the shared constraints.
pub fn quadratic_game_to_avi(g: &QuadraticGame) -> Result<AviProblem> {
    let h = g.pseudo_gradient();
    if factor_spd(&h.add(&h.transpose())?).is_err() {
        return Err(Error::AssumptionViolated("pseudo-gradient is not strongly monotone".into()));
    }
    let f = g.q.concat();
    AviProblem::new(h, f, g.a.clone(), g.b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::avi::{solve_dr_daqp, SolverSettings, Status};
    use crate::linalg::{norm_inf, sub};
    use crate::oracle::brute_force_solve;
    use crate::qp::QpWorkspace;

    #[test]
    fn symmetric_case() {
        let p = random_avi(&GenSpec::new(6, 10, 0.0, 3)).unwrap();
        assert!(p.h().sub(&p.h().transpose()).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn skew_plus_identity_case() {
        let p = random_avi(&GenSpec::new(6, 10, 1.0, 3).with_regularization(1.0)).unwrap();
        let k = p.h().shift_diagonal(-1.0);
        assert!(k.add(&k.transpose()).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn pure_skew_violates_monotonicity() {
        let r = random_avi(&GenSpec::new(4, 4, 1.0, 1));
        assert!(matches!(r, Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn strictly_feasible_point() {
        for seed in 0..20 {
            let (p, x0) = random_avi_with_point(&GenSpec::new(5, 40, 0.5, seed)).unwrap();
            let ax = p.a().mul_vec(&x0).unwrap();
            for (l, r) in ax.iter().zip(p.b()) {
                assert!(*l <= r - 0.1);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let s = GenSpec::new(7, 30, 0.3, 99);
        assert_eq!(random_avi(&s).unwrap(), random_avi(&s).unwrap());
        assert_ne!(random_avi(&s).unwrap(), random_avi(&s.clone().with_seed(100)).unwrap());
    }

    #[test]
    fn summands_have_unit_norm() {
        for n in [2, 5, 12] {
            let (s, k) = normalized_summands(&GenSpec::new(n, 0, 0.5, n as u64)).unwrap();
            assert!((s.frobenius_norm() - 1.0).abs() <= 1e-12);
            assert!((k.frobenius_norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn one_dimensional_skew_part_vanishes() {
        let p = random_avi(&GenSpec::new(1, 3, 0.5, 8)).unwrap();
        assert!((p.h()[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_grid() {
        for n in [5, 10, 20] {
            for seed in 0..20 {
                for (g, r) in [(0.0, 0.0), (0.5, 0.0), (0.9, 0.0), (1.0, 1.0)] {
                    let p = random_avi(&GenSpec::new(n, 2 * n, g, seed).with_regularization(r)).unwrap();
                    assert!(factor_spd(&p.h().add(&p.h().transpose()).unwrap()).is_ok());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(random_avi(&GenSpec::new(0, 3, 0.5, 1)).is_err());
        assert!(random_avi(&GenSpec::new(2, 3, 1.5, 1)).is_err());
        assert!(random_avi(&GenSpec::new(2, 3, 0.5, 1).with_regularization(-1.0)).is_err());
    }

    fn scalar_block(v: f64) -> Matrix {
        Matrix::from_rows(1, &[vec![v]]).unwrap()
    }

    #[test]
    fn single_player_is_a_qp() {
        let q = Matrix::from_rows(2, &[vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let a = Matrix::from_rows(2, &[vec![1.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let b = vec![0.5, 0.0];
        let lin = vec![-4.0, -3.0];
        let g = QuadraticGame::new(vec![vec![q.clone()]], vec![lin.clone()], a.clone(), b.clone()).unwrap();
        let p = quadratic_game_to_avi(&g).unwrap();
        let (sol, _) = solve_dr_daqp(&p, &SolverSettings::default(), &[0.0, 0.0]).unwrap();
        assert_eq!(sol.status, Status::Exact);
        let qp = QpWorkspace::new(&q, &a, &b).unwrap().clone().solve(&lin, false).unwrap();
        assert!(norm_inf(&sub(&sol.x, &qp.y)) <= 1e-10);
    }

    #[test]
    fn two_player_unconstrained() {
        let g = QuadraticGame::new(
            vec![vec![scalar_block(2.0), scalar_block(1.0)], vec![scalar_block(-1.0), scalar_block(2.0)]],
            vec![vec![-2.0], vec![-2.0]],
            Matrix::zeros(0, 2),
            vec![],
        )
        .unwrap();
        let p = quadratic_game_to_avi(&g).unwrap();
        // elimination on [[2,1],[-1,2]] x = (2,2): x1 = 2 x2 - 2, 5 x2 = 6
        let x2 = 6.0 / 5.0;
        let x1 = 2.0 * x2 - 2.0;
        let (sol, _) = solve_dr_daqp(&p, &SolverSettings::default(), &[0.0, 0.0]).unwrap();
        assert_eq!(sol.status, Status::Exact);
        assert!((sol.x[0] - x1).abs() < 1e-12 && (sol.x[1] - x2).abs() < 1e-12, "{:?}", sol.x);
    }

    #[test]
    fn zero_sum_bilinear_with_box() {
        // H = I + skew coupling, box |x_i| ≤ 0.5
        let c = Matrix::from_rows(2, &[vec![1.5, -0.5], vec![2.0, 1.0]]).unwrap();
        let blocks = vec![vec![Matrix::identity(2), c.clone()], vec![c.transpose().scale(-1.0), Matrix::identity(2)]];
        let a = Matrix::from_fn(8, 4, |i, j| {
            if i / 2 == j {
                if i % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        });
        let g = QuadraticGame::new(blocks, vec![vec![1.0, -2.0], vec![0.5, 3.0]], a, vec![0.5; 8]).unwrap();
        let p = quadratic_game_to_avi(&g).unwrap();
        let oracle = brute_force_solve(&p).unwrap();
        let (sol, _) = solve_dr_daqp(&p, &SolverSettings::default(), &[0.0; 4]).unwrap();
        assert!(norm_inf(&sub(&sol.x, &oracle.x)) <= 1e-8);
    }

    #[test]
    fn game_rejects_non_monotone() {
        let g = QuadraticGame::new(
            vec![vec![scalar_block(1.0), scalar_block(3.0)], vec![scalar_block(3.0), scalar_block(1.0)]],
            vec![vec![0.0], vec![0.0]],
            Matrix::zeros(0, 2),
            vec![],
        )
        .unwrap();
        assert!(matches!(quadratic_game_to_avi(&g), Err(Error::AssumptionViolated(_))));
    }
}
