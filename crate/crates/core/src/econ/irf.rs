use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::vecm::{vecm_to_var, VarForm, VecmModel};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relative ridge added to the diagonal when the covariance is numerically
/// not positive definite.
pub const RIDGE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CholeskyImpact {
    /// Lower triangular `P` with `P Pᵀ = Σ` (plus ridge, when applied).
    pub matrix: Matrix,
    /// Ridge added to the diagonal (0 when none was needed).
    pub ridge: f64,
}

/// Recursive identification in the given variable order.
pub fn cholesky_impact(sigma: &Matrix) -> Result<CholeskyImpact> {
    if let Ok(matrix) = sigma.cholesky() {
        return Ok(CholeskyImpact { matrix, ridge: 0.0 });
    }
    let k = sigma.rows();
    let mean_diag = (0..k).map(|i| sigma[(i, i)]).sum::<f64>() / k as f64;
    let ridge = RIDGE * mean_diag;
    if !(ridge > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let bumped = sigma.add(&Matrix::identity(k).scale(ridge));
    let matrix = bumped.cholesky()?;
    Ok(CholeskyImpact { matrix, ridge })
}

/// Moving-average matrices `Φ_0 = I`, `Φ_h = Σ_i A_i Φ_{h−i}` for `h ≤ horizon`.
pub fn ma_coefficients(var: &VarForm, horizon: usize) -> Result<Vec<Matrix>> {
    let k = var.dim();
    let mut phi = Vec::with_capacity(horizon + 1);
    phi.push(Matrix::identity(k));
    for h in 1..=horizon {
        let mut m = Matrix::zeros(k, k);
        for (i, a) in var.coefs.iter().enumerate().take(h) {
            m = m.add(&a.matmul(&phi[h - 1 - i]));
        }
        if !m.is_finite() || m.max_abs() > 1e300 {
            let prev = phi[h - 1].max_abs();
            let growth = if prev > 0.0 && prev.is_finite() {
                libm::pow(prev, 1.0 / (h - 1).max(1) as f64)
            } else {
                f64::INFINITY
            };
            return Err(Error::ExplosiveDynamics { horizon: h, growth });
        }
        phi.push(m);
    }
    Ok(phi)
}

/// Pointwise confidence bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfBands {
    pub lower: Vec<Matrix>,
    pub upper: Vec<Matrix>,
    pub level: f64,
    pub replications: usize,
    pub dropped: usize,
    pub method: String,
}

/// Orthogonalized responses: `responses[h][(response, shock)]` to a one
/// standard deviation shock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub names: Vec<String>,
    pub horizon: usize,
    pub responses: Vec<Matrix>,
    pub impact: CholeskyImpact,
    pub bands: Option<IrfBands>,
}

impl IrfResult {
    /// Response path of `response` to `shock`, horizons `0..=horizon`.
    pub fn path(&self, response: usize, shock: usize) -> Vec<f64> {
        self.responses.iter().map(|m| m[(response, shock)]).collect()
    }
}

/// `Θ_h = Φ_h P`.
pub fn impulse_response_from(var: &VarForm, impact: &CholeskyImpact, horizon: usize) -> Result<Vec<Matrix>> {
    Ok(ma_coefficients(var, horizon)?
        .iter()
        .map(|phi| phi.matmul(&impact.matrix))
        .collect())
}

pub fn impulse_response(model: &VecmModel, horizon: usize) -> Result<IrfResult> {
    let impact = cholesky_impact(&model.sigma)?;
    let responses = impulse_response_from(&vecm_to_var(model), &impact, horizon)?;
    Ok(IrfResult {
        names: model.names.clone(),
        horizon,
        responses,
        impact,
        bands: None,
    })
}

/// `shares[h − 1][(variable, shock)]`: share of the `h`-step forecast error
/// variance of `variable` due to `shock`, `h = 1..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FevdResult {
    pub names: Vec<String>,
    pub horizon: usize,
    pub shares: Vec<Matrix>,
}

/// Variance decomposition from orthogonalized responses `Θ_0..Θ_{H−1}`.
pub fn fevd_from(theta: &[Matrix], names: Vec<String>) -> FevdResult {
    let k = theta[0].rows();
    let mut acc = Matrix::zeros(k, k);
    let mut shares = Vec::with_capacity(theta.len());
    for t in theta {
        for i in 0..k {
            for j in 0..k {
                acc[(i, j)] += t[(i, j)] * t[(i, j)];
            }
        }
        let mut s = acc.clone();
        for i in 0..k {
            let total: f64 = acc.row(i).iter().sum();
            for v in s.row_mut(i) {
                *v /= total;
            }
        }
        shares.push(s);
    }
    FevdResult {
        names,
        horizon: theta.len(),
        shares,
    }
}

pub fn fevd(model: &VecmModel, horizon: usize) -> Result<FevdResult> {
    if horizon == 0 {
        return Err(Error::InvalidSpec("variance decomposition horizon must be at least 1".into()));
    }
    let irf = impulse_response(model, horizon - 1)?;
    Ok(fevd_from(&irf.responses, model.names.clone()))
}
