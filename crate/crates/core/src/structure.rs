//! Feature correlations, correlation-matrix PCA, k-means and the split of a
//! word-list into two sub-lists.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::lexicon::WordList;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::rng::{self, stream_rng, StreamRng};
use crate::stats;

/// Default k-means restarts.
pub const DEFAULT_RESTARTS: usize = 100;
/// Lloyd iteration cap per restart.
pub const MAX_ITERATIONS: usize = 300;
/// PCA runs on the correlation matrix (standardized features).
pub const PCA_METHOD: &str = "correlation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub features: Vec<String>,
    pub values: Matrix,
}

fn columns(matrix: &FeatureMatrix, features: &[&str]) -> Result<Vec<Vec<f64>>> {
    features.iter().map(|f| matrix.column(f)).collect()
}

/// Pairwise Pearson correlations of the selected features across words.
pub fn feature_correlations(matrix: &FeatureMatrix, features: &[&str]) -> Result<CorrelationMatrix> {
    if matrix.len() < 3 {
        return Err(Error::TooFewWords {
            found: matrix.len(),
            required: 3,
        });
    }
    let cols = columns(matrix, features)?;
    for (c, f) in cols.iter().zip(features) {
        if stats::variance(c) <= 0.0 {
            return Err(Error::ZeroVariance {
                feature: f.to_string(),
            });
        }
    }
    let p = features.len();
    let mut values = Matrix::identity(p);
    for i in 0..p {
        for j in i + 1..p {
            let r = stats::pearson(&cols[i], &cols[j]).unwrap_or(0.0);
            values[(i, j)] = r;
            values[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix {
        features: features.iter().map(|s| s.to_string()).collect(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub features: Vec<String>,
    pub words: Vec<String>,
    /// features × components
    pub loadings: Matrix,
    /// words × components
    pub scores: Matrix,
    /// Fraction of total variance per retained component.
    pub explained: Vec<f64>,
    /// Every eigenvalue of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
    pub method: String,
}

impl PcaResult {
    pub fn explained_total(&self) -> f64 {
        self.explained.iter().sum()
    }
}

/// Projects words onto the leading principal components of the
/// standardized features.
///
/// Each loading column is signed so its largest-magnitude entry is positive.
pub fn pca_project(matrix: &FeatureMatrix, features: &[&str], n_components: usize) -> Result<PcaResult> {
    let p = features.len();
    if n_components == 0 || p < n_components {
        return Err(Error::InvalidConfig(format!(
            "{n_components} components requested from {p} features"
        )));
    }
    let n = matrix.len();
    if n < n_components + 1 {
        return Err(Error::TooFewWords {
            found: n,
            required: n_components + 1,
        });
    }
    let cols = columns(matrix, features)?;
    let mut means = Vec::with_capacity(p);
    let mut sds = Vec::with_capacity(p);
    for (c, f) in cols.iter().zip(features) {
        let sd = stats::std_dev(c);
        if !(sd > 0.0) {
            return Err(Error::ZeroVariance {
                feature: f.to_string(),
            });
        }
        means.push(stats::mean(c));
        sds.push(sd);
    }
    let z = Matrix::from_fn(n, p, |i, j| (cols[j][i] - means[j]) / sds[j]);
    let corr = z.t_matmul(&z).scale(1.0 / (n as f64 - 1.0));
    let eig = symmetric_eigen(&corr);
    let total: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    let rank = eig.values.iter().filter(|&&v| v > 1e-9 * total).count();
    if rank < n_components {
        return Err(Error::RankDeficient {
            rank,
            required: n_components,
        });
    }
    let mut loadings = eig.vectors.columns(0..n_components);
    for c in 0..n_components {
        let mut best = 0;
        for r in 1..p {
            if loadings[(r, c)].abs() > loadings[(best, c)].abs() {
                best = r;
            }
        }
        if loadings[(best, c)] < 0.0 {
            for r in 0..p {
                loadings[(r, c)] = -loadings[(r, c)];
            }
        }
    }
    let scores = z.matmul(&loadings);
    let eigenvalues: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    Ok(PcaResult {
        features: features.iter().map(|s| s.to_string()).collect(),
        words: matrix.words().to_vec(),
        loadings,
        scores,
        explained: eigenvalues[..n_components].iter().map(|v| v / total).collect(),
        eigenvalues,
        means,
        std_devs: sds,
        method: PCA_METHOD.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub words: Vec<String>,
    /// Cluster id per word, `1..=k`.
    pub labels: Vec<usize>,
    /// k × dimension, row `c` is cluster `c + 1`.
    pub centroids: Matrix,
    pub inertia: f64,
    pub seed: u64,
    pub n_restarts: usize,
    /// Restart that produced the kept solution.
    pub best_restart: usize,
}

impl ClusterAssignment {
    pub fn k(&self) -> usize {
        self.centroids.rows()
    }

    pub fn label_of(&self, word: &str) -> Option<usize> {
        self.words.iter().position(|w| w == word).map(|i| self.labels[i])
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = sq_dist(point, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Greedy k-means++ seeding: each new center is the best of several
/// D²-weighted candidates.
fn seed_centroids(points: &Matrix, k: usize, rng: &mut StreamRng) -> Matrix {
    let n = points.rows();
    let mut centroids = Matrix::zeros(k, points.cols());
    let first = rng::below(rng, n);
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    let candidates = 2 + libm::log(k as f64) as usize;
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for _ in 0..candidates {
            let pick = if total > 0.0 {
                let mut target = rng::uniform(rng) * total;
                let mut chosen = n - 1;
                for (i, d) in d2.iter().enumerate() {
                    if target < *d {
                        chosen = i;
                        break;
                    }
                    target -= d;
                }
                chosen
            } else {
                rng::below(rng, n)
            };
            let next: Vec<f64> = (0..n)
                .map(|i| d2[i].min(sq_dist(points.row(i), points.row(pick))))
                .collect();
            let potential: f64 = next.iter().sum();
            if best.as_ref().is_none_or(|b| potential < b.1) {
                best = Some((pick, potential, next));
            }
        }
        let (pick, _, next) = best.expect("at least one candidate");
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        d2 = next;
    }
    centroids
}

/// Result of one k-means restart.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub labels: Vec<usize>,
    pub centroids: Matrix,
    pub inertia: f64,
    pub inertia_trace: Vec<f64>,
}

fn inertia_of(points: &Matrix, labels: &[usize], centroids: &Matrix) -> f64 {
    (0..points.rows())
        .map(|i| sq_dist(points.row(i), centroids.row(labels[i])))
        .sum()
}

pub(crate) fn lloyd(points: &Matrix, mut centroids: Matrix) -> LloydRun {
    let n = points.rows();
    let k = centroids.rows();
    let dim = points.cols();
    let mut labels = vec![usize::MAX; n];
    let mut trace = Vec::new();
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for i in 0..n {
            let (c, _) = nearest(points.row(i), &centroids);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        trace.push(inertia_of(points, &labels, &centroids));
        if !changed {
            break;
        }
        let mut sums = Matrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, v) in sums.row_mut(labels[i]).iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s / counts[c] as f64;
                }
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed at the point farthest from its own centroid.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(points.row(a), centroids.row(labels[a]))
                            .total_cmp(&sq_dist(points.row(b), centroids.row(labels[b])))
                            .then(b.cmp(&a))
                    })
                    .expect("non-empty data");
                counts[labels[far]] -= 1;
                counts[c] = 1;
                labels[far] = c;
                centroids.row_mut(c).copy_from_slice(points.row(far));
            }
        }
    }
    let inertia = inertia_of(points, &labels, &centroids);
    LloydRun {
        labels,
        centroids,
        inertia,
        inertia_trace: trace,
    }
}

fn distinct_rows(points: &Matrix) -> usize {
    let mut rows: Vec<&[f64]> = (0..points.rows()).map(|i| points.row(i)).collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(*b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    rows.dedup();
    rows.len()
}

/// Best-of-`n_restarts` k-means with squared Euclidean distance.
///
/// Restart `r` uses stream `(seed, r)`; the lowest inertia wins, ties going
/// to the lowest restart index. Cluster ids are then ordered by centroid
/// coordinates (cluster 1 has the lowest first coordinate).
pub fn kmeans_cluster(
    words: &[String],
    points: &Matrix,
    k: usize,
    n_restarts: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    assert_eq!(words.len(), points.rows(), "one point per word");
    check_kmeans_input(points, k, n_restarts)?;
    let runs = (0..n_restarts).map(|r| kmeans_restart(points, k, seed, r)).collect();
    Ok(kmeans_from_runs(words, runs, seed))
}

/// Checks that `points` can be split into `k` clusters.
pub fn check_kmeans_input(points: &Matrix, k: usize, n_restarts: usize) -> Result<()> {
    if k == 0 || n_restarts == 0 {
        return Err(Error::InvalidConfig("k and n_restarts must be positive".to_string()));
    }
    let distinct = distinct_rows(points);
    if distinct < k {
        return Err(Error::TooFewDistinctPoints {
            found: distinct,
            required: k,
        });
    }
    Ok(())
}

/// Keeps the lowest-inertia run (earliest on ties) from runs given in
/// restart order.
pub fn kmeans_from_runs(words: &[String], runs: Vec<LloydRun>, seed: u64) -> ClusterAssignment {
    let n_restarts = runs.len();
    let mut best: Option<(usize, LloydRun)> = None;
    for (r, run) in runs.into_iter().enumerate() {
        if best.as_ref().is_none_or(|(_, b)| run.inertia < b.inertia) {
            best = Some((r, run));
        }
    }
    let (best_restart, run) = best.expect("at least one restart");
    canonicalize(words, run, seed, n_restarts, best_restart)
}

/// One restart; exposed so callers can run restarts concurrently and pass
/// the runs to [`kmeans_from_runs`].
pub fn kmeans_restart(points: &Matrix, k: usize, seed: u64, restart: usize) -> LloydRun {
    let mut g = stream_rng(seed, restart as u64);
    lloyd(points, seed_centroids(points, k, &mut g))
}

fn canonicalize(
    words: &[String],
    run: LloydRun,
    seed: u64,
    n_restarts: usize,
    best_restart: usize,
) -> ClusterAssignment {
    let k = run.centroids.rows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        run.centroids
            .row(a)
            .iter()
            .zip(run.centroids.row(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(a.cmp(&b))
    });
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    ClusterAssignment {
        words: words.to_vec(),
        labels: run.labels.iter().map(|&l| relabel[l] + 1).collect(),
        centroids: run.centroids.select_rows(&order),
        inertia: run.inertia,
        seed,
        n_restarts,
        best_restart,
    }
}

/// How to label clusters whose labeling statistics tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    /// Refuse to label.
    #[default]
    Error,
    /// Treat cluster 1 as the first sub-list.
    FirstCluster,
}

/// Splits the rated words of `list` along a two-cluster assignment.
///
/// The first returned list is the cluster with the higher mean of
/// `high_features` summed per word (e.g. Cognition + Drive); words without a
/// cluster or feature row are left out of both.
pub fn split_word_list(
    list: &WordList,
    assignment: &ClusterAssignment,
    matrix: &FeatureMatrix,
    high_features: &[&str],
    tie: TieBreak,
) -> Result<(WordList, WordList)> {
    if assignment.k() != 2 {
        return Err(Error::InvalidConfig(format!(
            "split needs exactly 2 clusters, got {}",
            assignment.k()
        )));
    }
    let idx: Vec<usize> = high_features
        .iter()
        .map(|f| matrix.feature_index(f))
        .collect::<Result<_>>()?;
    let mut members: [Vec<&str>; 2] = [Vec::new(), Vec::new()];
    let mut sums = [0.0; 2];
    for w in list.words() {
        let (Some(label), Some(row)) = (assignment.label_of(w), matrix.row(w)) else {
            continue;
        };
        let c = label - 1;
        members[c].push(w);
        sums[c] += idx.iter().map(|&j| row[j]).sum::<f64>();
    }
    let means = [
        sums[0] / members[0].len() as f64,
        sums[1] / members[1].len() as f64,
    ];
    let tol = 1e-12 * (1.0 + means[0].abs().max(means[1].abs()));
    let first = if (means[0] - means[1]).abs() <= tol {
        match tie {
            TieBreak::Error => return Err(Error::LabelTie { value: means[0] }),
            TieBreak::FirstCluster => 0,
        }
    } else if means[0] > means[1] {
        0
    } else {
        1
    };
    let alt1 = WordList::new(format!("{}_alt1", list.name()), &members[first])?;
    let alt2 = WordList::new(format!("{}_alt2", list.name()), &members[1 - first])?;
    Ok((alt1, alt2))
}
