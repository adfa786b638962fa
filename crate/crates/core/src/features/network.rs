//! Single-hidden-layer ReLU regression network trained with Adam on mean
//! squared error, with early stopping on a held-out split.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{self, StreamRng};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub hidden_units: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub validation_fraction: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Minimum number of rated words with embeddings needed to train.
    pub min_training_words: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            hidden_units: 100,
            max_epochs: 500,
            patience: 20,
            validation_fraction: 0.1,
            learning_rate: 1e-3,
            batch_size: 32,
            min_training_words: 100,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.hidden_units == 0 {
            return bad("hidden_units must be positive");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must lie in (0, 1)");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        Ok(())
    }
}

/// Held-out fit quality recorded after training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationScore {
    pub mse: f64,
    /// Pearson correlation on the validation split (0 when undefined).
    pub correlation: f64,
    pub best_epoch: usize,
    pub epochs_run: usize,
}

/// A fitted network for one feature. Inputs must already be standardized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regressor {
    pub feature: String,
    /// hidden_units × input dimension
    pub hidden_weights: Matrix,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub validation: ValidationScore,
}

impl Regressor {
    pub fn predict(&self, z: &[f64]) -> f64 {
        let mut y = self.output_bias;
        for (h, (b, v)) in self.hidden_bias.iter().zip(&self.output_weights).enumerate() {
            let pre: f64 = b + self
                .hidden_weights
                .row(h)
                .iter()
                .zip(z)
                .map(|(w, x)| w * x)
                .sum::<f64>();
            if pre > 0.0 {
                y += v * pre;
            }
        }
        y
    }
}

struct Params {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

impl Params {
    fn len(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + 1
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut Params, grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - libm::pow(BETA1, f64::from(self.t));
        let c2 = 1.0 - libm::pow(BETA2, f64::from(self.t));
        let mut k = 0;
        let mut update = |p: &mut f64, g: f64| {
            self.m[k] = BETA1 * self.m[k] + (1.0 - BETA1) * g;
            self.v[k] = BETA2 * self.v[k] + (1.0 - BETA2) * g * g;
            *p -= lr * (self.m[k] / c1) / (libm::sqrt(self.v[k] / c2) + ADAM_EPS);
            k += 1;
        };
        for (p, g) in params.w1.iter_mut().zip(grad) {
            update(p, *g);
        }
        let off = params.w1.len();
        for (p, g) in params.b1.iter_mut().zip(&grad[off..]) {
            update(p, *g);
        }
        let off = off + params.b1.len();
        for (p, g) in params.w2.iter_mut().zip(&grad[off..]) {
            update(p, *g);
        }
        update(&mut params.b2, grad[grad.len() - 1]);
    }
}

fn forward(p: &Params, x: &[f64], hidden: &mut [f64]) -> f64 {
    let d = x.len();
    let mut y = p.b2;
    for (h, out) in hidden.iter_mut().enumerate() {
        let w = &p.w1[h * d..(h + 1) * d];
        let pre = p.b1[h] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        *out = if pre > 0.0 { pre } else { 0.0 };
        y += p.w2[h] * *out;
    }
    y
}

fn mse(p: &Params, x: &Matrix, t: &[f64], idx: &[usize], hidden: &mut [f64]) -> f64 {
    idx.iter()
        .map(|&i| {
            let e = forward(p, x.row(i), hidden) - t[i];
            e * e
        })
        .sum::<f64>()
        / idx.len() as f64
}

pub(super) fn fit(
    feature: &str,
    x: &Matrix,
    targets: &[f64],
    config: &NetworkConfig,
    rng: &mut StreamRng,
) -> Result<Regressor> {
    let n = x.rows();
    let d = x.cols();
    let hidden = config.hidden_units;
    if n < 3 {
        return Err(Error::InsufficientOverlap {
            found: n,
            required: 3,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    rng::shuffle(rng, &mut order);
    let n_val = (libm::round(n as f64 * config.validation_fraction) as usize).clamp(1, n - 2);
    let (val_idx, train_idx) = order.split_at(n_val);
    let mut train_idx = train_idx.to_vec();
    let val_idx = val_idx.to_vec();

    // He initialization; output bias starts at the training mean.
    let he = libm::sqrt(2.0 / d.max(1) as f64);
    let mut p = Params {
        w1: (0..hidden * d).map(|_| he * rng::standard_normal(rng)).collect(),
        b1: vec![0.0; hidden],
        w2: (0..hidden)
            .map(|_| libm::sqrt(1.0 / hidden as f64) * rng::standard_normal(rng))
            .collect(),
        b2: train_idx.iter().map(|&i| targets[i]).sum::<f64>() / train_idx.len() as f64,
    };
    let mut adam = Adam::new(p.len());
    let mut grad = vec![0.0; p.len()];
    let mut h_buf = vec![0.0; hidden];

    let mut best_loss = mse(&p, x, targets, &val_idx, &mut h_buf);
    let mut best = (p.w1.clone(), p.b1.clone(), p.w2.clone(), p.b2);
    let mut best_epoch = 0;
    let mut epochs_run = 0;

    for epoch in 1..=config.max_epochs {
        epochs_run = epoch;
        rng::shuffle(rng, &mut train_idx);
        for batch in train_idx.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 2.0 / batch.len() as f64;
            let (gw1, rest) = grad.split_at_mut(hidden * d);
            let (gb1, rest) = rest.split_at_mut(hidden);
            let (gw2, gb2) = rest.split_at_mut(hidden);
            for &i in batch {
                let xi = x.row(i);
                let y = forward(&p, xi, &mut h_buf);
                let dy = scale * (y - targets[i]);
                gb2[0] += dy;
                for h in 0..hidden {
                    if h_buf[h] <= 0.0 {
                        continue;
                    }
                    gw2[h] += dy * h_buf[h];
                    let dh = dy * p.w2[h];
                    gb1[h] += dh;
                    for (g, xv) in gw1[h * d..(h + 1) * d].iter_mut().zip(xi) {
                        *g += dh * xv;
                    }
                }
            }
            adam.step(&mut p, &grad, config.learning_rate);
        }
        let loss = mse(&p, x, targets, &val_idx, &mut h_buf);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                feature: feature.to_string(),
                epoch,
            });
        }
        if loss < best_loss {
            best_loss = loss;
            best = (p.w1.clone(), p.b1.clone(), p.w2.clone(), p.b2);
            best_epoch = epoch;
        } else if epoch - best_epoch >= config.patience {
            break;
        }
    }

    let (w1, b1, w2, b2) = best;
    let regressor = Regressor {
        feature: feature.to_string(),
        hidden_weights: Matrix::from_vec(hidden, d, w1),
        hidden_bias: b1,
        output_weights: w2,
        output_bias: b2,
        validation: ValidationScore {
            mse: best_loss,
            correlation: 0.0,
            best_epoch,
            epochs_run,
        },
    };
    let preds: Vec<f64> = val_idx.iter().map(|&i| regressor.predict(x.row(i))).collect();
    let truth: Vec<f64> = val_idx.iter().map(|&i| targets[i]).collect();
    let correlation = if preds.len() >= 2 {
        stats::pearson(&preds, &truth).unwrap_or(0.0)
    } else {
        0.0
    };
    Ok(Regressor {
        validation: ValidationScore {
            correlation,
            ..regressor.validation
        },
        ..regressor
    })
}
