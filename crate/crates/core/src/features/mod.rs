//! Predicting semantic feature ratings from word embeddings.
//!
//! One small regression network is fitted per feature on words that carry
//! human ratings; the fitted bundle then predicts ratings for any word with
//! an embedding.

mod embedding;
mod matrix;
mod network;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use embedding::EmbeddingTable;
pub use matrix::FeatureMatrix;
pub use network::{NetworkConfig, Regressor, ValidationScore};

use crate::error::{Error, Result};
use crate::lexicon::{RatingTable, Scale, WordList};
use crate::linalg::Matrix;
use crate::rng::{self, substream};
use crate::stats;

/// Format version written into persisted bundles.
pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// Per-dimension input standardization fitted on the training words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &Matrix) -> Self {
        let n = x.rows() as f64;
        let d = x.cols();
        let mut means = vec![0.0; d];
        for i in 0..x.rows() {
            for (m, v) in means.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut scales = vec![0.0; d];
        for i in 0..x.rows() {
            for ((s, v), m) in scales.iter_mut().zip(x.row(i)).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut scales {
            let sd = libm::sqrt(*s / n);
            *s = if sd > 1e-12 { sd } else { 1.0 };
        }
        Self { means, scales }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(&self.means)
            .zip(&self.scales)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

/// One fitted regressor per rated feature, plus everything needed to
/// reproduce the fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRegressorBundle {
    pub format_version: u32,
    pub config: NetworkConfig,
    pub seed: u64,
    pub dimension: usize,
    pub scale: Scale,
    pub training_words: usize,
    pub standardizer: Standardizer,
    pub regressors: Vec<Regressor>,
}

impl FeatureRegressorBundle {
    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.regressors.iter().map(|r| r.feature.as_str())
    }

    /// Clamped predictions for one raw embedding vector.
    pub fn predict_vector(&self, embedding: &[f64]) -> Vec<f64> {
        let z = self.standardizer.apply(embedding);
        self.regressors
            .iter()
            .map(|r| {
                let y = r.predict(&z);
                if y.is_finite() {
                    self.scale.clamp(y)
                } else {
                    self.scale.min
                }
            })
            .collect()
    }
}

/// Training inputs for every feature, shared by the per-feature jobs.
pub struct BundleTrainer {
    config: NetworkConfig,
    seed: u64,
    scale: Scale,
    features: Vec<String>,
    standardizer: Standardizer,
    inputs: Matrix,
    targets: Matrix,
}

impl BundleTrainer {
    fn from_rows(
        config: &NetworkConfig,
        seed: u64,
        scale: Scale,
        features: Vec<String>,
        raw_inputs: Matrix,
        targets: Matrix,
    ) -> Self {
        let standardizer = Standardizer::fit(&raw_inputs);
        let inputs = Matrix::from_fn(raw_inputs.rows(), raw_inputs.cols(), |i, j| {
            (raw_inputs[(i, j)] - standardizer.means[j]) / standardizer.scales[j]
        });
        Self {
            config: config.clone(),
            seed,
            scale,
            features,
            standardizer,
            inputs,
            targets,
        }
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_words(&self) -> usize {
        self.inputs.rows()
    }

    /// Fits the regressor for feature `j` on its own random stream.
    pub fn train_feature(&self, j: usize) -> Result<Regressor> {
        let targets = self.targets.col(j);
        let mut rng = rng::stream_rng(self.seed, j as u64);
        network::fit(
            &self.features[j],
            &self.inputs,
            &targets,
            &self.config,
            &mut rng,
        )
    }

    pub fn train_all(&self) -> Result<Vec<Regressor>> {
        (0..self.n_features()).map(|j| self.train_feature(j)).collect()
    }

    /// Wraps fitted regressors (in feature order) into a bundle.
    pub fn finish(&self, regressors: Vec<Regressor>) -> Result<FeatureRegressorBundle> {
        if regressors.len() != self.features.len()
            || regressors.iter().zip(&self.features).any(|(r, f)| &r.feature != f)
        {
            return Err(Error::InvalidConfig(
                "regressors do not match the feature list".to_string(),
            ));
        }
        Ok(FeatureRegressorBundle {
            format_version: BUNDLE_FORMAT_VERSION,
            config: self.config.clone(),
            seed: self.seed,
            dimension: self.inputs.cols(),
            scale: self.scale,
            training_words: self.inputs.rows(),
            standardizer: self.standardizer.clone(),
            regressors,
        })
    }
}

/// Rated words that also have embeddings, in table order.
fn overlap(binder: &RatingTable, embeddings: &EmbeddingTable) -> (Vec<String>, Matrix, Matrix) {
    let mut words = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (w, ratings) in binder.iter() {
        if let Some(e) = embeddings.get(w) {
            words.push(w.to_string());
            x.extend_from_slice(e);
            y.extend_from_slice(ratings);
        }
    }
    let n = words.len();
    (
        words,
        Matrix::from_vec(n, embeddings.dimension(), x),
        Matrix::from_vec(n, binder.features().len(), y),
    )
}

/// Prepares per-feature training on every rated word that has an embedding.
pub fn bundle_trainer(
    binder: &RatingTable,
    embeddings: &EmbeddingTable,
    config: &NetworkConfig,
    seed: u64,
) -> Result<BundleTrainer> {
    config.validate()?;
    let (_, x, y) = overlap(binder, embeddings);
    if x.rows() < config.min_training_words {
        return Err(Error::InsufficientOverlap {
            found: x.rows(),
            required: config.min_training_words,
        });
    }
    Ok(BundleTrainer::from_rows(
        config,
        seed,
        binder.scale(),
        binder.features().to_vec(),
        x,
        y,
    ))
}

/// Fits one regression network per feature of `binder`.
pub fn train_feature_regressors(
    binder: &RatingTable,
    embeddings: &EmbeddingTable,
    config: &NetworkConfig,
    seed: u64,
) -> Result<FeatureRegressorBundle> {
    let trainer = bundle_trainer(binder, embeddings, config, seed)?;
    let regressors = trainer.train_all()?;
    trainer.finish(regressors)
}

/// Predictions for every list word with an embedding, plus the words that
/// had none.
pub fn predict_features(
    bundle: &FeatureRegressorBundle,
    words: &WordList,
    embeddings: &EmbeddingTable,
) -> Result<(FeatureMatrix, Vec<String>)> {
    if embeddings.dimension() != bundle.dimension {
        return Err(Error::DimensionMismatch {
            word: "<embedding table>".to_string(),
            expected: bundle.dimension,
            found: embeddings.dimension(),
        });
    }
    let mut kept = Vec::new();
    let mut values = Vec::new();
    let mut dropped = Vec::new();
    for w in words.words() {
        match embeddings.get(w) {
            Some(e) => {
                kept.push(w.clone());
                values.extend(bundle.predict_vector(e));
            }
            None => dropped.push(w.clone()),
        }
    }
    if kept.is_empty() {
        return Err(Error::NoOverlap {
            list: words.name().to_string(),
        });
    }
    let names: Vec<String> = bundle.feature_names().map(str::to_string).collect();
    let m = Matrix::from_vec(kept.len(), names.len(), values);
    Ok((FeatureMatrix::new(kept, names, m, bundle.scale)?, dropped))
}

/// Held-out correlations from k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub features: Vec<String>,
    /// Mean held-out Pearson correlation per feature.
    pub mean_r: Vec<f64>,
    /// Per-fold correlations (fold × feature); empty in leave-one-out mode.
    pub fold_r: Vec<Vec<f64>>,
    pub k_folds: usize,
    pub n_words: usize,
    /// Leave-one-out runs pool all held-out predictions into one correlation.
    pub pooled: bool,
}

/// Trains and scores one fold; the runner decides how per-feature jobs are
/// scheduled.
pub fn cross_validate_with<F>(
    binder: &RatingTable,
    embeddings: &EmbeddingTable,
    config: &NetworkConfig,
    k_folds: usize,
    seed: u64,
    mut run: F,
) -> Result<CrossValidation>
where
    F: FnMut(&BundleTrainer) -> Result<Vec<Regressor>>,
{
    config.validate()?;
    if k_folds < 2 {
        return Err(Error::InvalidConfig("k_folds must be at least 2".to_string()));
    }
    let (_, x, y) = overlap(binder, embeddings);
    let n = x.rows();
    if n < k_folds {
        return Err(Error::FoldTooSmall { fold: n, size: 0 });
    }
    let pooled = k_folds == n;
    let mut order: Vec<usize> = (0..n).collect();
    rng::shuffle(&mut rng::stream_rng(seed, u64::MAX), &mut order);
    let folds: Vec<Vec<usize>> = (0..k_folds)
        .map(|f| {
            let mut idx: Vec<usize> = order.iter().copied().skip(f).step_by(k_folds).collect();
            idx.sort_unstable();
            idx
        })
        .collect();
    if !pooled {
        if let Some((f, fold)) = folds.iter().enumerate().find(|(_, f)| f.len() < 2) {
            return Err(Error::FoldTooSmall {
                fold: f,
                size: fold.len(),
            });
        }
    }
    let n_features = binder.features().len();
    let mut held_out = Matrix::zeros(n, n_features);
    let mut fold_r = Vec::new();
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> = (0..n).filter(|i| test.binary_search(i).is_err()).collect();
        let trainer = BundleTrainer::from_rows(
            config,
            substream(seed, f as u64),
            binder.scale(),
            binder.features().to_vec(),
            x.select_rows(&train),
            y.select_rows(&train),
        );
        let bundle = trainer.finish(run(&trainer)?)?;
        for &i in test {
            let pred = bundle.predict_vector(x.row(i));
            held_out.row_mut(i).copy_from_slice(&pred);
        }
        if !pooled {
            let r = (0..n_features)
                .map(|j| {
                    let p: Vec<f64> = test.iter().map(|&i| held_out[(i, j)]).collect();
                    let t: Vec<f64> = test.iter().map(|&i| y[(i, j)]).collect();
                    stats::pearson(&p, &t).unwrap_or(0.0)
                })
                .collect();
            fold_r.push(r);
        }
    }
    let mean_r = if pooled {
        (0..n_features)
            .map(|j| stats::pearson(&held_out.col(j), &y.col(j)).unwrap_or(0.0))
            .collect()
    } else {
        (0..n_features)
            .map(|j| fold_r.iter().map(|r: &Vec<f64>| r[j]).sum::<f64>() / k_folds as f64)
            .collect()
    };
    Ok(CrossValidation {
        features: binder.features().to_vec(),
        mean_r,
        fold_r,
        k_folds,
        n_words: n,
        pooled,
    })
}

/// Sequential k-fold cross-validation.
pub fn cross_validate(
    binder: &RatingTable,
    embeddings: &EmbeddingTable,
    config: &NetworkConfig,
    k_folds: usize,
    seed: u64,
) -> Result<CrossValidation> {
    cross_validate_with(binder, embeddings, config, k_folds, seed, |t| t.train_all())
}
