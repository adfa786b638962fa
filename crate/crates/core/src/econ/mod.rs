//! Time-series econometrics for the macro panel: unit-root and cointegration
//! tests, a mixed vector error correction model, orthogonalized impulse
//! responses, variance decompositions and residual bootstrap bands.
//!
//! Deterministic terms are an unrestricted constant throughout (no trend in
//! the cointegration space).

mod adf;
mod bootstrap;
pub mod critical;
mod irf;
mod johansen;
mod lag;
mod panel;
pub mod simulate;
mod vecm;

pub use adf::{adf_test, AdfResult, Deterministic, DEFAULT_MAX_LAG};
pub use bootstrap::{hall_bootstrap_irf, hall_interval, BootstrapPlan};
pub use irf::{
    cholesky_impact, fevd, fevd_from, impulse_response, impulse_response_from, ma_coefficients,
    CholeskyImpact, FevdResult, IrfBands, IrfResult,
};
pub use johansen::{johansen_trace, JohansenResult};
pub use lag::{select_lag, LagSelection};
pub use panel::MacroPanel;
pub use vecm::{estimate_vecm, estimate_vecm_on, vecm_to_var, VarForm, VecmModel, VecmSpec};

/// Deterministic specification recorded in model metadata.
pub const DETERMINISTIC_TERMS: &str = "unrestricted-constant";

use crate::error::Result;
use crate::linalg::{Matrix, Qr};

/// OLS fit of every column of `y` on `x`.
pub(crate) struct Ols {
    pub coef: Matrix,
    pub resid: Matrix,
    pub qr: Qr,
}

pub(crate) fn ols(x: &Matrix, y: &Matrix) -> Result<Ols> {
    if x.rows() <= x.cols() {
        return Err(crate::Error::InsufficientObservations {
            available: x.rows(),
            required: x.cols(),
        });
    }
    let qr = Qr::new(x);
    let coef = qr.solve(y)?;
    let resid = y.sub(&x.matmul(&coef));
    Ok(Ols { coef, resid, qr })
}

/// Row-wise first differences.
pub(crate) fn diff(data: &Matrix) -> Matrix {
    Matrix::from_fn(data.rows() - 1, data.cols(), |i, j| data[(i + 1, j)] - data[(i, j)])
}
