use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::ols;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub lag: usize,
    /// Schwarz criterion for lags `1..=max_lag`.
    pub bic: Vec<f64>,
    /// Rows in the common estimation sample.
    pub nobs: usize,
}

/// Levels-VAR lag order minimizing the Schwarz criterion
/// `ln|Σ̂| + ln(T)/T · p·k²`, every order fitted on the same sample.
pub fn select_lag(data: &Matrix, max_lag: usize) -> Result<LagSelection> {
    if max_lag == 0 {
        return Err(Error::InvalidSpec("max_lag must be at least 1".into()));
    }
    let (t_all, k) = (data.rows(), data.cols());
    let required = k * max_lag + 1;
    if t_all <= max_lag || t_all - max_lag <= required {
        return Err(Error::InsufficientObservations {
            available: t_all.saturating_sub(max_lag),
            required,
        });
    }
    let nobs = t_all - max_lag;
    let y = data.row_range(max_lag..t_all);
    let mut bic = Vec::with_capacity(max_lag);
    for p in 1..=max_lag {
        let x = Matrix::from_fn(nobs, 1 + k * p, |i, j| {
            if j == 0 {
                1.0
            } else {
                let (l, v) = ((j - 1) / k + 1, (j - 1) % k);
                data[(max_lag + i - l, v)]
            }
        });
        let fit = ols(&x, &y)?;
        let sigma = fit.resid.t_matmul(&fit.resid).scale(1.0 / nobs as f64);
        let ld = sigma.ln_det_spd().map_err(|_| Error::SingularMoments)?;
        bic.push(ld + libm::log(nobs as f64) / nobs as f64 * (p * k * k) as f64);
    }
    let lag = 1 + (0..max_lag).fold(0, |b, i| if bic[i] < bic[b] { i } else { b });
    Ok(LagSelection { lag, bic, nobs })
}
