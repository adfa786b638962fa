use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::johansen::{moments, reduced_rank};
use super::panel::MacroPanel;
use super::{diff, ols, DETERMINISTIC_TERMS};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Mixed VECM specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VecmSpec {
    /// Lag length of the levels VAR (the VECM has `lag − 1` lagged differences).
    pub lag: usize,
    /// Cointegrating relations estimated among the non-stationary variables.
    pub rank: usize,
    /// Variables entering through identity relations.
    pub stationary: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmModel {
    pub names: Vec<String>,
    pub lag: usize,
    pub rank: usize,
    pub stationary: Vec<String>,
    /// k × (rank + #stationary); estimated relations first, normalized so
    /// their leading square block is the identity, then one identity column
    /// per stationary variable.
    pub beta: Matrix,
    /// k × (rank + #stationary)
    pub alpha: Matrix,
    /// Short-run matrices on `ΔY_{t−1} .. ΔY_{t−lag+1}`.
    pub gamma: Vec<Matrix>,
    pub intercept: Vec<f64>,
    /// Residual covariance `UᵀU / T`.
    pub sigma: Matrix,
    /// T × k, rows aligned with observations `lag..`.
    pub residuals: Matrix,
    pub nobs: usize,
    pub deterministic: String,
    /// Johansen eigenvalues of the non-stationary block, when estimated.
    pub eigenvalues: Vec<f64>,
}

/// Levels VAR `Y_t = c + Σ A_i Y_{t−i} + u_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarForm {
    pub intercept: Vec<f64>,
    pub coefs: Vec<Matrix>,
}

impl VarForm {
    pub fn dim(&self) -> usize {
        self.intercept.len()
    }

    pub fn lag(&self) -> usize {
        self.coefs.len()
    }

    /// `E[Y_t | past]` from the rows of `data` before `t`.
    pub fn one_step(&self, data: &Matrix, t: usize) -> Vec<f64> {
        let mut y = self.intercept.clone();
        for (i, a) in self.coefs.iter().enumerate() {
            let prev = a.mul_vec(data.row(t - 1 - i));
            y.iter_mut().zip(prev).for_each(|(y, p)| *y += p);
        }
        y
    }

    /// kp × kp companion matrix.
    pub fn companion(&self) -> Matrix {
        let (k, p) = (self.dim(), self.lag());
        let mut c = Matrix::zeros(k * p, k * p);
        for (l, a) in self.coefs.iter().enumerate() {
            for i in 0..k {
                for j in 0..k {
                    c[(i, l * k + j)] = a[(i, j)];
                }
            }
        }
        for i in k..k * p {
            c[(i, i - k)] = 1.0;
        }
        c
    }
}

impl VecmModel {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Long-run impact `Π = α βᵀ`.
    pub fn pi(&self) -> Matrix {
        self.alpha.matmul(&self.beta.transpose())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// One-step prediction of the level `Y_t` in error-correction form.
    pub fn one_step(&self, data: &Matrix, t: usize) -> Vec<f64> {
        let prev = data.row(t - 1);
        let ect = self.pi().mul_vec(prev);
        let mut y: Vec<f64> = prev
            .iter()
            .zip(&self.intercept)
            .zip(ect)
            .map(|((a, b), c)| a + b + c)
            .collect();
        for (i, g) in self.gamma.iter().enumerate() {
            let l = i + 1;
            let d: Vec<f64> = data.row(t - l).iter().zip(data.row(t - l - 1)).map(|(a, b)| a - b).collect();
            y.iter_mut().zip(g.mul_vec(&d)).for_each(|(y, v)| *y += v);
        }
        y
    }

    pub fn spec(&self) -> VecmSpec {
        VecmSpec {
            lag: self.lag,
            rank: self.rank,
            stationary: self.stationary.clone(),
        }
    }
}

/// Estimates the mixed VECM on a panel.
pub fn estimate_vecm(panel: &MacroPanel, spec: &VecmSpec) -> Result<VecmModel> {
    estimate_vecm_on(panel.data(), panel.names(), spec)
}

/// Estimates the mixed VECM on raw T × k data.
pub fn estimate_vecm_on(data: &Matrix, names: &[String], spec: &VecmSpec) -> Result<VecmModel> {
    let k = data.cols();
    let p = spec.lag;
    if names.len() != k {
        return Err(Error::InvalidSpec(format!("{} names for {k} variables", names.len())));
    }
    if p == 0 {
        return Err(Error::InvalidSpec("lag must be at least 1".into()));
    }
    let mut stat_idx = Vec::with_capacity(spec.stationary.len());
    for s in &spec.stationary {
        let j = names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| Error::UnknownVariable(s.clone()))?;
        if stat_idx.contains(&j) {
            return Err(Error::InvalidSpec(format!("`{s}` listed twice as stationary")));
        }
        stat_idx.push(j);
    }
    let nonstat: Vec<usize> = (0..k).filter(|j| !stat_idx.contains(j)).collect();
    let r = spec.rank;
    if r > nonstat.len() {
        return Err(Error::RankTooLarge {
            rank: r,
            variables: nonstat.len(),
        });
    }

    let n_rel = r + stat_idx.len();
    let mut beta = Matrix::zeros(k, n_rel);
    let mut eigenvalues = Vec::new();
    if r > 0 {
        let block = data.select_cols(&nonstat);
        let (values, vectors) = reduced_rank(&moments(&block, p)?)?;
        eigenvalues = values;
        let b = vectors.columns(0..r);
        let lead = b.row_range(0..r).inverse().map_err(|_| Error::Singular)?;
        let b = b.matmul(&lead);
        for (row, &v) in nonstat.iter().enumerate() {
            for c in 0..r {
                beta[(v, c)] = b[(row, c)];
            }
        }
    }
    for (c, &v) in stat_idx.iter().enumerate() {
        beta[(v, r + c)] = 1.0;
    }

    let t_all = data.rows();
    let n_x = n_rel + 1 + k * (p - 1);
    if t_all <= p || t_all - p <= n_x {
        return Err(Error::InsufficientObservations {
            available: t_all.saturating_sub(p),
            required: n_x,
        });
    }
    let d = diff(data);
    let nobs = t_all - p;
    let ect = data.row_range(p - 1..t_all - 1).matmul(&beta);
    let x = Matrix::from_fn(nobs, n_x, |i, j| {
        if j < n_rel {
            ect[(i, j)]
        } else if j == n_rel {
            1.0
        } else {
            let jj = j - n_rel - 1;
            let (l, v) = (jj / k + 1, jj % k);
            d[(p + i - 1 - l, v)]
        }
    });
    let y = d.row_range(p - 1..t_all - 1);
    let fit = ols(&x, &y)?;
    // coef is n_x × k; transpose to equation rows.
    let coef = fit.coef.transpose();
    let alpha = coef.columns(0..n_rel);
    let intercept = coef.col(n_rel);
    let gamma = (0..p - 1)
        .map(|l| coef.columns(n_rel + 1 + l * k..n_rel + 1 + (l + 1) * k))
        .collect();
    let sigma = fit.resid.t_matmul(&fit.resid).scale(1.0 / nobs as f64).symmetrize();
    Ok(VecmModel {
        names: names.to_vec(),
        lag: p,
        rank: r,
        stationary: spec.stationary.clone(),
        beta,
        alpha,
        gamma,
        intercept,
        sigma,
        residuals: fit.resid,
        nobs,
        deterministic: DETERMINISTIC_TERMS.to_string(),
        eigenvalues,
    })
}

/// Levels-VAR form: `A1 = I + Π + Γ1`, `Ai = Γi − Γi−1`, `Ap = −Γp−1`.
pub fn vecm_to_var(model: &VecmModel) -> VarForm {
    let k = model.dim();
    let p = model.lag;
    let pi = model.pi();
    let g = &model.gamma;
    let mut coefs = Vec::with_capacity(p);
    for i in 1..=p {
        let mut a = if i == 1 {
            Matrix::identity(k).add(&pi)
        } else {
            g[i - 2].scale(-1.0)
        };
        if i < p {
            a = a.add(&g[i - 1]);
        }
        coefs.push(a);
    }
    VarForm {
        intercept: model.intercept.clone(),
        coefs,
    }
}
