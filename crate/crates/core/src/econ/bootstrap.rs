use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::irf::{impulse_response, IrfBands, IrfResult};
use super::vecm::{estimate_vecm_on, vecm_to_var, VarForm, VecmModel};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{below, stream_rng};
use crate::stats::quantile_sorted;

pub const MIN_REPLICATIONS: usize = 100;
/// Largest tolerated fraction of failed replications.
pub const MAX_DROP_FRACTION: f64 = 0.05;

/// Hall's percentile interval `[2θ̂ − q_{1−α/2}, 2θ̂ − q_{α/2}]` from sorted
/// bootstrap replicates.
pub fn hall_interval(point: f64, sorted: &[f64], level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let q_lo = quantile_sorted(sorted, alpha / 2.0);
    let q_hi = quantile_sorted(sorted, 1.0 - alpha / 2.0);
    (2.0 * point - q_hi, 2.0 * point - q_lo)
}

/// Residual bootstrap of orthogonalized impulse responses.
///
/// Replication `r` draws from stream `(seed, r)` and is independent of every
/// other replication, so they may run in any order or concurrently; pass the
/// results to [`finish`](Self::finish) in replication order.
pub struct BootstrapPlan<'a> {
    model: &'a VecmModel,
    data: &'a Matrix,
    var: VarForm,
    centered: Matrix,
    point: IrfResult,
    pub replications: usize,
    pub level: f64,
    pub horizon: usize,
    pub seed: u64,
}

impl<'a> BootstrapPlan<'a> {
    pub fn new(
        model: &'a VecmModel,
        data: &'a Matrix,
        replications: usize,
        level: f64,
        horizon: usize,
        seed: u64,
    ) -> Result<Self> {
        if replications < MIN_REPLICATIONS {
            return Err(Error::InvalidSpec(format!(
                "bootstrap needs at least {MIN_REPLICATIONS} replications, got {replications}"
            )));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidSpec(format!("confidence level {level} outside (0, 1)")));
        }
        if data.rows() != model.nobs + model.lag || data.cols() != model.dim() {
            return Err(Error::InvalidSpec(
                "bootstrap data differ from the estimation sample".to_string(),
            ));
        }
        let k = model.dim();
        let n = model.residuals.rows();
        let means: Vec<f64> = (0..k)
            .map(|j| model.residuals.col(j).iter().sum::<f64>() / n as f64)
            .collect();
        let centered = Matrix::from_fn(n, k, |i, j| model.residuals[(i, j)] - means[j]);
        Ok(Self {
            model,
            data,
            var: vecm_to_var(model),
            centered,
            point: impulse_response(model, horizon)?,
            replications,
            level,
            horizon,
            seed,
        })
    }

    pub fn point(&self) -> &IrfResult {
        &self.point
    }

    /// Pseudo-sample for replication `r`, started from the observed initial
    /// values.
    pub fn pseudo_sample(&self, r: usize) -> Matrix {
        let mut rng = stream_rng(self.seed, r as u64);
        let (t_all, k, p) = (self.data.rows(), self.data.cols(), self.model.lag);
        let mut y = Matrix::zeros(t_all, k);
        for t in 0..p {
            y.row_mut(t).copy_from_slice(self.data.row(t));
        }
        for t in p..t_all {
            let mean = self.var.one_step(&y, t);
            let draw = below(&mut rng, self.centered.rows());
            for (j, m) in mean.iter().enumerate() {
                y[(t, j)] = m + self.centered[(draw, j)];
            }
        }
        y
    }

    /// Responses re-estimated on replication `r`.
    pub fn replicate(&self, r: usize) -> Result<Vec<Matrix>> {
        let y = self.pseudo_sample(r);
        let m = estimate_vecm_on(&y, &self.model.names, &self.model.spec())?;
        Ok(impulse_response(&m, self.horizon)?.responses)
    }

    /// Merges replication results (in replication order) into Hall bands.
    pub fn finish(self, results: Vec<Result<Vec<Matrix>>>) -> Result<IrfResult> {
        let total = results.len();
        let ok: Vec<Vec<Matrix>> = results.into_iter().filter_map(|r| r.ok()).collect();
        let dropped = total - ok.len();
        if dropped as f64 > MAX_DROP_FRACTION * total as f64 || ok.len() < 2 {
            return Err(Error::BootstrapFailure {
                dropped,
                replications: total,
            });
        }
        let k = self.model.dim();
        let mut lower = Vec::with_capacity(self.horizon + 1);
        let mut upper = Vec::with_capacity(self.horizon + 1);
        let mut draws = Vec::with_capacity(ok.len());
        for h in 0..=self.horizon {
            let mut lo = Matrix::zeros(k, k);
            let mut hi = Matrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    draws.clear();
                    draws.extend(ok.iter().map(|rep| rep[h][(i, j)]));
                    draws.sort_by(f64::total_cmp);
                    let (a, b) = hall_interval(self.point.responses[h][(i, j)], &draws, self.level);
                    lo[(i, j)] = a;
                    hi[(i, j)] = b;
                }
            }
            lower.push(lo);
            upper.push(hi);
        }
        let mut out = self.point;
        out.bands = Some(IrfBands {
            lower,
            upper,
            level: self.level,
            replications: total,
            dropped,
            method: "hall-percentile".to_string(),
        });
        Ok(out)
    }
}

/// Sequential driver for [`BootstrapPlan`].
pub fn hall_bootstrap_irf(
    model: &VecmModel,
    data: &Matrix,
    replications: usize,
    level: f64,
    horizon: usize,
    seed: u64,
) -> Result<IrfResult> {
    let plan = BootstrapPlan::new(model, data, replications, level, horizon, seed)?;
    let results = (0..replications).map(|r| plan.replicate(r)).collect();
    plan.finish(results)
}
