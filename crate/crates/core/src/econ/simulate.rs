//! Data-generating processes for simulation checks.

use alloc::vec::Vec;

use rand_core::RngCore;

use super::vecm::VarForm;
use crate::linalg::Matrix;
use crate::rng::{standard_normal, uniform};

/// Simulates `Y_t = c + Σ A_i Y_{t−i} + P ε_t` with standard normal `ε`,
/// starting from the `lag` rows of `init`; returns `n` rows after discarding
/// `burn` rows.
pub fn simulate_var<R: RngCore + ?Sized>(
    var: &VarForm,
    impact: &Matrix,
    init: &Matrix,
    n: usize,
    burn: usize,
    rng: &mut R,
) -> Matrix {
    let (k, p) = (var.dim(), var.lag());
    assert_eq!(init.rows(), p, "init must hold `lag` rows");
    let total = p + burn + n;
    let mut y = Matrix::zeros(total, k);
    for t in 0..p {
        y.row_mut(t).copy_from_slice(init.row(t));
    }
    let mut eps = alloc::vec![0.0; k];
    for t in p..total {
        eps.iter_mut().for_each(|e| *e = standard_normal(rng));
        let shock = impact.mul_vec(&eps);
        let mean = var.one_step(&y, t);
        for j in 0..k {
            y[(t, j)] = mean[j] + shock[j];
        }
    }
    y.row_range(p + burn..total)
}

/// Noise-free path from `history` (the last `lag` rows) with the given
/// innovation added at each step.
pub fn deterministic_path(var: &VarForm, history: &Matrix, innovations: &[Vec<f64>]) -> Matrix {
    let (k, p) = (var.dim(), var.lag());
    let mut y = Matrix::zeros(p + innovations.len(), k);
    for t in 0..p {
        y.row_mut(t).copy_from_slice(history.row(history.rows() - p + t));
    }
    for (s, u) in innovations.iter().enumerate() {
        let t = p + s;
        let mean = var.one_step(&y, t);
        for j in 0..k {
            y[(t, j)] = mean[j] + u[j];
        }
    }
    y.row_range(p..p + innovations.len())
}

/// Random VAR whose coefficient row sums satisfy `Σ_i ‖A_i‖_∞ ≤ bound < 1`,
/// which guarantees stability.
pub fn random_stable_var<R: RngCore + ?Sized>(k: usize, lag: usize, bound: f64, rng: &mut R) -> VarForm {
    let mut coefs: Vec<Matrix> = (0..lag)
        .map(|_| Matrix::from_fn(k, k, |_, _| 2.0 * uniform(rng) - 1.0))
        .collect();
    let norm = (0..k)
        .map(|i| coefs.iter().map(|a| a.row(i).iter().map(|v| v.abs()).sum::<f64>()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = bound * uniform(rng).max(0.05) / norm;
    coefs.iter_mut().for_each(|a| *a = a.scale(s));
    VarForm {
        intercept: (0..k).map(|_| uniform(rng) - 0.5).collect(),
        coefs,
    }
}

/// Random positive definite covariance `B Bᵀ + 0.1 I`.
pub fn random_covariance<R: RngCore + ?Sized>(k: usize, rng: &mut R) -> Matrix {
    let b = Matrix::from_fn(k, k, |_, _| standard_normal(rng));
    b.matmul(&b.transpose()).add(&Matrix::identity(k).scale(0.1)).symmetrize()
}

/// Independent Gaussian random walks with a common drift, starting at zero.
pub fn random_walks<R: RngCore + ?Sized>(n: usize, k: usize, drift: f64, rng: &mut R) -> Matrix {
    let mut y = Matrix::zeros(n, k);
    for t in 0..n {
        for j in 0..k {
            let prev = if t == 0 { 0.0 } else { y[(t - 1, j)] };
            y[(t, j)] = prev + drift + standard_normal(rng);
        }
    }
    y
}

/// Bivariate system with one common stochastic trend:
/// `x_t` a random walk with drift, `y_t = x_t + u_t` with `u_t` a stationary
/// AR(1).
pub fn cointegrated_pair<R: RngCore + ?Sized>(n: usize, ar: f64, drift: f64, rng: &mut R) -> Matrix {
    let mut y = Matrix::zeros(n, 2);
    let (mut x, mut u) = (0.0, 0.0);
    for t in 0..n {
        x += drift + standard_normal(rng);
        u = ar * u + standard_normal(rng);
        y[(t, 0)] = x;
        y[(t, 1)] = x + u;
    }
    y
}
