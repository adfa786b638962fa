use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::critical::{johansen_max_eig_critical, johansen_trace_critical, MAX_JOHANSEN_DIM};
use super::{diff, ols};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    /// Descending, in `[0, 1)`.
    pub eigenvalues: Vec<f64>,
    /// Trace statistic for `H0: rank ≤ r`, `r = 0..k`.
    pub trace: Vec<f64>,
    /// Maximum-eigenvalue statistic for `H0: rank = r` against `r + 1`.
    pub max_eig: Vec<f64>,
    /// Trace quantiles (90%, 95%, 99%) per `r`.
    pub trace_critical: Vec<[f64; 3]>,
    pub max_eig_critical: Vec<[f64; 3]>,
    /// First `r` whose trace statistic is below its 5% critical value.
    pub rank: usize,
    /// Cointegrating vectors as columns, normalized so `βᵀ S11 β = I`.
    pub eigenvectors: Matrix,
    /// Levels lag.
    pub lag: usize,
    pub nobs: usize,
}

/// Residual moment matrices of the reduced-rank regression
/// `ΔY_t = α βᵀ Y_{t−1} + c + Σ Γ_i ΔY_{t−i} + ε_t`.
pub(crate) struct Moments {
    pub s00: Matrix,
    pub s01: Matrix,
    pub s11: Matrix,
    pub nobs: usize,
}

pub(crate) fn moments(data: &Matrix, lag: usize) -> Result<Moments> {
    let (t_all, k) = (data.rows(), data.cols());
    let n_z = 1 + k * (lag - 1);
    if t_all <= lag || t_all - lag <= n_z + k {
        return Err(Error::InsufficientObservations {
            available: t_all.saturating_sub(lag),
            required: n_z + k,
        });
    }
    let d = diff(data);
    let nobs = t_all - lag;
    // Row i is time t = lag + i; d row t − 1 holds ΔY_t.
    let z = Matrix::from_fn(nobs, n_z, |i, j| {
        if j == 0 {
            1.0
        } else {
            let (l, v) = ((j - 1) / k + 1, (j - 1) % k);
            d[(lag + i - 1 - l, v)]
        }
    });
    let dy = Matrix::from_fn(nobs, k, |i, v| d[(lag + i - 1, v)]);
    let ylag = Matrix::from_fn(nobs, k, |i, v| data[(lag + i - 1, v)]);
    let r0 = ols(&z, &dy).map_err(|_| Error::SingularMoments)?.resid;
    let r1 = ols(&z, &ylag).map_err(|_| Error::SingularMoments)?.resid;
    let scale = 1.0 / nobs as f64;
    Ok(Moments {
        s00: r0.t_matmul(&r0).scale(scale),
        s01: r0.t_matmul(&r1).scale(scale),
        s11: r1.t_matmul(&r1).scale(scale),
        nobs,
    })
}

/// Eigenvalues (descending) and `S11`-orthonormal eigenvectors of
/// `S11⁻¹ S10 S00⁻¹ S01`.
pub(crate) fn reduced_rank(m: &Moments) -> Result<(Vec<f64>, Matrix)> {
    let l = m.s11.cholesky().map_err(|_| Error::SingularMoments)?;
    let l_inv = l.inverse().map_err(|_| Error::SingularMoments)?;
    let s00_inv = m.s00.inverse().map_err(|_| Error::SingularMoments)?;
    let s10 = m.s01.transpose();
    let inner = s10.matmul(&s00_inv).matmul(&m.s01);
    let sym = l_inv.matmul(&inner).matmul(&l_inv.transpose());
    let eig = symmetric_eigen(&sym);
    if eig.values.iter().any(|v| !v.is_finite() || *v >= 1.0 - 1e-12) {
        return Err(Error::SingularMoments);
    }
    let values = eig.values.iter().map(|v| v.max(0.0)).collect();
    let vectors = l_inv.transpose().matmul(&eig.vectors);
    Ok((values, vectors))
}

/// Johansen trace test with an unrestricted constant.
pub fn johansen_trace(data: &Matrix, lag: usize) -> Result<JohansenResult> {
    let k = data.cols();
    if k < 2 {
        return Err(Error::InvalidSpec("cointegration test needs at least 2 variables".into()));
    }
    if k > MAX_JOHANSEN_DIM {
        return Err(Error::InvalidSpec(format!(
            "critical values are tabulated for at most {MAX_JOHANSEN_DIM} variables"
        )));
    }
    if lag == 0 {
        return Err(Error::InvalidSpec("lag must be at least 1".into()));
    }
    let m = moments(data, lag)?;
    let (eigenvalues, eigenvectors) = reduced_rank(&m)?;
    let t = m.nobs as f64;
    let logs: Vec<f64> = eigenvalues.iter().map(|l| libm::log(1.0 - l)).collect();
    let trace: Vec<f64> = (0..k).map(|r| -t * logs[r..].iter().sum::<f64>()).collect();
    let max_eig: Vec<f64> = (0..k).map(|r| -t * logs[r]).collect();
    let trace_critical: Vec<[f64; 3]> =
        (0..k).map(|r| johansen_trace_critical(k - r).expect("dimension checked")).collect();
    let max_eig_critical: Vec<[f64; 3]> =
        (0..k).map(|r| johansen_max_eig_critical(k - r).expect("dimension checked")).collect();
    let rank = (0..k).find(|&r| trace[r] < trace_critical[r][1]).unwrap_or(k);
    Ok(JohansenResult {
        eigenvalues,
        trace,
        max_eig,
        trace_critical,
        max_eig_critical,
        rank,
        eigenvectors,
        lag,
        nobs: m.nobs,
    })
}
