//! Monte-Carlo randomization tests between word-lists and valence-matched
//! resampling.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::lexicon::RatedWordSet;
use crate::rng::{self, stream_rng, StreamRng};

/// Sidedness recorded in every result.
pub const ALTERNATIVE: &str = "two-sided";

/// Default number of valence buckets.
pub const DEFAULT_BUCKETS: usize = 10;
/// Default number of matched-resampling repeats.
pub const DEFAULT_REPEATS: usize = 2000;
/// Default number of permutation resamples.
pub const DEFAULT_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTestResult {
    /// `mean(a) − mean(b)`
    pub observed_diff: f64,
    pub p_value: f64,
    pub exceed_count: usize,
    pub n_resamples: usize,
    pub seed: u64,
    pub alternative: String,
}

fn cmp_samples(a: &[f64], b: &[f64]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Two-sided permutation test of the difference in means.
///
/// The pooled sample is re-split at the original sizes `n_resamples` times;
/// resample `r` uses stream `(seed, r)`. The p-value uses the add-one rule
/// `(exceed + 1) / (n_resamples + 1)`.
pub fn mc_mean_diff_test(
    a: &[f64],
    b: &[f64],
    n_resamples: usize,
    seed: u64,
) -> Result<McTestResult> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(Error::SampleTooSmall {
                len: s.len(),
                required: 2,
            });
        }
    }
    if n_resamples == 0 {
        return Err(Error::ZeroResamples);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            word: "<sample>".to_string(),
        });
    }
    // Relabeling a↔b must give the same p-value, so resampling always runs
    // on a canonical orientation.
    let (first, second) = if cmp_samples(a, b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    };
    let pool: Vec<f64> = first.iter().chain(second).copied().collect();
    let total: f64 = pool.iter().sum();
    let n1 = first.len();
    let n2 = second.len();
    let stat = |sum1: f64| (sum1 / n1 as f64 - (total - sum1) / n2 as f64).abs();
    let observed = stat(first.iter().sum());
    let scale = pool.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let threshold = observed - 1e-12 * scale;

    let mut work = pool.clone();
    let mut exceed = 0usize;
    for r in 0..n_resamples {
        work.copy_from_slice(&pool);
        let mut g = stream_rng(seed, r as u64);
        rng::partial_shuffle(&mut g, &mut work, n1);
        if stat(work[..n1].iter().sum()) >= threshold {
            exceed += 1;
        }
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    Ok(McTestResult {
        observed_diff: mean(a) - mean(b),
        p_value: (exceed + 1) as f64 / (n_resamples + 1) as f64,
        exceed_count: exceed,
        n_resamples,
        seed,
        alternative: ALTERNATIVE.to_string(),
    })
}

/// Per-bucket counts of one valence-matched draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketCount {
    pub target: usize,
    pub source: usize,
    /// Words drawn from the source (and imposed on the target side).
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedSample {
    /// Sampled source words, grouped by bucket.
    pub words: Vec<String>,
    pub buckets: Vec<BucketCount>,
}

/// Equal-width bucketing of one rating axis.
struct BucketPlan {
    /// Source row indices per bucket, in row order.
    source: Vec<Vec<usize>>,
    target_counts: Vec<usize>,
}

fn bucket_of(v: f64, min: f64, width: f64, n: usize) -> usize {
    let b = libm::floor((v - min) / width * n as f64);
    if b <= 0.0 {
        0
    } else {
        (b as usize).min(n - 1)
    }
}

impl BucketPlan {
    fn new(
        target: &RatedWordSet,
        source: &RatedWordSet,
        feature: &str,
        n_buckets: usize,
        keep_target: impl Fn(&str) -> bool,
        keep_source: impl Fn(&str) -> bool,
    ) -> Result<Self> {
        if n_buckets == 0 {
            return Err(Error::ZeroBuckets);
        }
        let scale = source.scale();
        let (min, width) = (scale.min, scale.width());
        let tj = target.feature_index(feature)?;
        let sj = source.feature_index(feature)?;
        let mut target_counts = vec![0usize; n_buckets];
        for (w, r) in target.rows() {
            if keep_target(w) {
                target_counts[bucket_of(r[tj], min, width, n_buckets)] += 1;
            }
        }
        let mut src = vec![Vec::new(); n_buckets];
        for (i, (w, r)) in source.rows().iter().enumerate() {
            if keep_source(w) {
                src[bucket_of(r[sj], min, width, n_buckets)].push(i);
            }
        }
        let plan = Self {
            source: src,
            target_counts,
        };
        let matched: usize = plan.matched_counts().sum();
        if matched < 2 {
            return Err(Error::InsufficientMatch { matched });
        }
        Ok(plan)
    }

    fn matched_counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.source
            .iter()
            .zip(&self.target_counts)
            .map(|(s, &t)| s.len().min(t))
    }

    /// Source row indices of one matched draw.
    fn draw(&self, rng: &mut StreamRng) -> Vec<usize> {
        let mut out = Vec::new();
        for (bucket, m) in self.source.iter().zip(self.matched_counts()) {
            let mut idx = bucket.clone();
            rng::partial_shuffle(rng, &mut idx, m);
            out.extend_from_slice(&idx[..m]);
        }
        out
    }

    fn counts(&self) -> Vec<BucketCount> {
        self.source
            .iter()
            .zip(&self.target_counts)
            .map(|(s, &t)| BucketCount {
                target: t,
                source: s.len(),
                matched: s.len().min(t),
            })
            .collect()
    }
}

/// Draws a source subset whose valence histogram matches the target's.
///
/// The rating scale of `source` is split into `n_buckets` equal-width
/// intervals; each bucket contributes `min(target count, source count)`
/// source words sampled without replacement.
pub fn valence_bucket_match(
    target: &RatedWordSet,
    source: &RatedWordSet,
    valence_feature: &str,
    n_buckets: usize,
    seed: u64,
) -> Result<MatchedSample> {
    let plan = BucketPlan::new(target, source, valence_feature, n_buckets, |_| true, |_| true)?;
    let idx = plan.draw(&mut stream_rng(seed, 0));
    Ok(MatchedSample {
        words: idx.iter().map(|&i| source.rows()[i].0.clone()).collect(),
        buckets: plan.counts(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureComparison {
    pub feature: String,
    /// Mean over repeats of the matched source sample's feature mean.
    pub matched_source_mean: f64,
    pub target_mean: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedComparison {
    pub target: String,
    pub source: String,
    pub features: Vec<FeatureComparison>,
    pub n_repeats: usize,
    pub n_buckets: usize,
    pub seed: u64,
    /// Source words drawn per repeat.
    pub matched_size: usize,
    pub buckets: Vec<BucketCount>,
    pub alternative: String,
}

/// Compares target feature means against repeated valence-matched draws
/// from the source.
///
/// Both sets are first restricted to words that have a row in `features`.
/// For each feature the p-value is two-sided:
/// `min(1, (2·min(#{src ≥ tgt}, #{src ≤ tgt}) + 1) / (n_repeats + 1))`.
pub fn matched_feature_comparison(
    target: &RatedWordSet,
    source: &RatedWordSet,
    valence_feature: &str,
    features: &FeatureMatrix,
    n_repeats: usize,
    n_buckets: usize,
    seed: u64,
) -> Result<MatchedComparison> {
    if n_repeats == 0 {
        return Err(Error::ZeroResamples);
    }
    let has_row = |w: &str| features.row_index(w).is_some();
    let plan = BucketPlan::new(target, source, valence_feature, n_buckets, has_row, has_row)?;
    let nf = features.features().len();

    let mut target_mean = vec![0.0; nf];
    let mut n_target = 0usize;
    for (w, _) in target.rows() {
        if let Some(row) = features.row(w) {
            n_target += 1;
            for (m, v) in target_mean.iter_mut().zip(row) {
                *m += v;
            }
        }
    }
    if n_target == 0 {
        return Err(Error::InsufficientMatch { matched: 0 });
    }
    target_mean.iter_mut().for_each(|m| *m /= n_target as f64);

    let source_rows: Vec<usize> = source
        .rows()
        .iter()
        .map(|(w, _)| features.row_index(w).unwrap_or(usize::MAX))
        .collect();
    let matched_size: usize = plan.matched_counts().sum();
    let mut sum_means = vec![0.0; nf];
    let mut ge = vec![0usize; nf];
    let mut le = vec![0usize; nf];
    let mut repeat_mean = vec![0.0; nf];
    for r in 0..n_repeats {
        let draw = plan.draw(&mut stream_rng(seed, r as u64));
        repeat_mean.iter_mut().for_each(|m| *m = 0.0);
        for i in &draw {
            let row = features.values().row(source_rows[*i]);
            for (m, v) in repeat_mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for j in 0..nf {
            let m = repeat_mean[j] / draw.len() as f64;
            sum_means[j] += m;
            let tol = 1e-12 * (1.0 + target_mean[j].abs());
            if m >= target_mean[j] - tol {
                ge[j] += 1;
            }
            if m <= target_mean[j] + tol {
                le[j] += 1;
            }
        }
    }
    let features_out = (0..nf)
        .map(|j| FeatureComparison {
            feature: features.features()[j].clone(),
            matched_source_mean: sum_means[j] / n_repeats as f64,
            target_mean: target_mean[j],
            p_value: ((2 * ge[j].min(le[j]) + 1) as f64 / (n_repeats + 1) as f64).min(1.0),
        })
        .collect();
    Ok(MatchedComparison {
        target: target.list_name().to_string(),
        source: source.list_name().to_string(),
        features: features_out,
        n_repeats,
        n_buckets,
        seed,
        matched_size,
        buckets: plan.counts(),
        alternative: ALTERNATIVE.to_string(),
    })
}
