use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::critical::adf_critical_values;
use super::ols;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Default maximum augmentation lag for monthly data.
pub const DEFAULT_MAX_LAG: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Deterministic {
    #[default]
    Constant,
    ConstantTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-ratio on the lagged level.
    pub statistic: f64,
    /// Number of lagged differences chosen by the Schwarz criterion.
    pub lag: usize,
    pub max_lag: usize,
    /// Rows in the final regression.
    pub nobs: usize,
    pub deterministic: Deterministic,
    /// Critical values at 1%, 5% and 10%.
    pub critical_values: [f64; 3],
    pub rejected_at_5pct: bool,
}

/// Regression `Δy_t` on `[y_{t−1}, deterministic, Δy_{t−1..t−lag}]` using the
/// last `nobs` available rows.
fn design(y: &[f64], dy: &[f64], lag: usize, nobs: usize, det: Deterministic) -> (Matrix, Matrix) {
    let first = dy.len() - nobs;
    let k = 1 + lag + if det == Deterministic::Constant { 1 } else { 2 };
    let x = Matrix::from_fn(nobs, k, |i, j| {
        let t = first + i; // index into dy; Δy_t = y[t+1] − y[t]
        match (j, det) {
            (0, _) => y[t],
            (1, _) => 1.0,
            (2, Deterministic::ConstantTrend) => (t + 1) as f64,
            _ => {
                let l = j - if det == Deterministic::Constant { 1 } else { 2 };
                dy[t - l]
            }
        }
    });
    let target = Matrix::from_fn(nobs, 1, |i, _| dy[first + i]);
    (x, target)
}

/// Augmented Dickey-Fuller test with Schwarz lag selection.
///
/// Every candidate lag is fitted on the sample left by `max_lag`; the chosen
/// lag is then refitted on the longest sample it allows.
pub fn adf_test(series: &[f64], max_lag: usize, deterministic: Deterministic) -> Result<AdfResult> {
    let n = series.len();
    if n <= max_lag + 10 {
        return Err(Error::SeriesTooShort {
            len: n,
            required: max_lag + 10,
        });
    }
    if series.iter().all(|v| *v == series[0]) {
        return Err(Error::ConstantSeries);
    }
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let common = dy.len() - max_lag;
    let mut best = (f64::INFINITY, 0);
    for lag in 0..=max_lag {
        let (x, t) = design(series, &dy, lag, common, deterministic);
        let fit = ols(&x, &t)?;
        let ssr: f64 = fit.resid.data().iter().map(|e| e * e).sum();
        let bic = common as f64 * libm::log(ssr / common as f64) + x.cols() as f64 * libm::log(common as f64);
        if bic < best.0 {
            best = (bic, lag);
        }
    }
    let lag = best.1;
    let nobs = dy.len() - lag;
    let (x, t) = design(series, &dy, lag, nobs, deterministic);
    let fit = ols(&x, &t)?;
    let ssr: f64 = fit.resid.data().iter().map(|e| e * e).sum();
    let s2 = ssr / (nobs - x.cols()) as f64;
    let se = libm::sqrt(s2 * fit.qr.xtx_inverse_diagonal()?[0]);
    let statistic = fit.coef[(0, 0)] / se;
    let critical_values = adf_critical_values(deterministic, nobs);
    Ok(AdfResult {
        statistic,
        lag,
        max_lag,
        nobs,
        deterministic,
        critical_values,
        rejected_at_5pct: statistic < critical_values[1],
    })
}
