//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any
//! check fails.
//!
//! Two checks need external data and report NOT RUN without it:
//!
//! * lexicon means against published values: `SENTISHIFT_NRC_VAD` (NRC VAD
//!   table, `word<TAB>Valence<TAB>Arousal<TAB>Dominance`) plus any of
//!   `SENTISHIFT_LIST_{HIV_POSITIVE,LM_POSITIVE,RSS_APPROACH,HIV_NEGATIVE,
//!   LM_NEGATIVE,RSS_AVOIDANCE}` (one word per line);
//! * two-component variance on the avoidance list:
//!   `SENTISHIFT_AVOIDANCE_FEATURES` (predicted feature CSV).
//!
//! A positional argument filters criteria by name, as with the default
//! harness.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use sentishift::formats::read_feature_matrix;
use sentishift_core::econ::simulate::*;
use sentishift_core::econ::*;
use sentishift_core::features::{cross_validate_with, CrossValidation, NetworkConfig};
use sentishift_core::resampling::mc_mean_diff_test;
use sentishift_core::rng::{below, shuffle, standard_normal, stream_rng, uniform};
use sentishift_core::sentiment::{build_monthly_index, Article, Date, ScoreMode, ScoringLexicon, Weighting};
use sentishift_core::structure::{kmeans_cluster, pca_project};
use sentishift_core::{EmbeddingTable, FeatureMatrix, Matrix, RatingTable, Scale, WordList};

const BIN: &str = env!("CARGO_BIN_EXE_sentishift");

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    NotRun,
}

struct Report {
    status: Status,
    detail: String,
    notes: Vec<String>,
}

impl Report {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Report {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            notes: Vec::new(),
        }
    }

    fn not_run(detail: impl Into<String>) -> Self {
        Report {
            status: Status::NotRun,
            detail: detail.into(),
            notes: Vec::new(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self::new(false, detail)
    }
}

type Check = fn() -> Report;

const CRITERIA: [(&str, &str, u64, Check); 7] = [
    ("1", "permutation_oracle", 60, permutation_oracle),
    ("2", "lexicon_means", 60, lexicon_means),
    ("3", "feature_extrapolation", 600, feature_extrapolation),
    ("4", "pca_kmeans", 600, pca_kmeans),
    ("5", "sentiment_index", 60, sentiment_index),
    ("6", "econometrics_oracles", 1800, econometrics),
    ("7", "end_to_end_determinism", 900, determinism),
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (id, name, _, _) in CRITERIA {
            println!("criterion_{id}_{name}: test");
        }
        return;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, budget, check) in CRITERIA {
        let full = format!("criterion_{id}_{name}");
        if !filters.is_empty() && !filters.iter().any(|f| full.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let mut r = check();
        let took = t0.elapsed();
        if r.status == Status::Pass && took > Duration::from_secs(budget) {
            r.status = Status::Fail;
            r.detail.push_str(&format!("; over the {budget} s budget"));
        }
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::NotRun => "NOT RUN",
        };
        println!("criterion {id} {tag:<7} {name}: {} [{:.1} s]", r.detail, took.as_secs_f64());
        for n in &r.notes {
            println!("    {n}");
        }
    }
    println!("acceptance: {ran} criteria checked, {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// 1. Monte-Carlo permutation p against exhaustive enumeration

/// Exact two-sided p over every relabeling, in integer arithmetic.
fn exact_p(a: &[i64], b: &[i64]) -> f64 {
    let pool: Vec<i64> = a.iter().chain(b).copied().collect();
    let (n1, n2) = (a.len() as i64, b.len() as i64);
    let total: i64 = pool.iter().sum();
    // |mean1 − mean2| scaled by n1·n2
    let stat = |s1: i64| (n2 * s1 - n1 * (total - s1)).abs();
    let observed = stat(a.iter().sum());
    let (mut hits, mut all) = (0u64, 0u64);
    for mask in 0u32..(1 << pool.len()) {
        if i64::from(mask.count_ones()) != n1 {
            continue;
        }
        let s1: i64 = (0..pool.len()).filter(|i| mask >> i & 1 == 1).map(|i| pool[i]).sum();
        all += 1;
        if stat(s1) >= observed {
            hits += 1;
        }
    }
    hits as f64 / all as f64
}

fn permutation_oracle() -> Report {
    let mut worst = 0.0f64;
    let mut small = 0;
    let pairs = 24;
    for i in 0..pairs {
        let mut g = stream_rng(1, i);
        let n1 = 3 + below(&mut g, 6);
        let n2 = 3 + below(&mut g, 6);
        let shift = (i % 4) as i64;
        let a: Vec<i64> = (0..n1).map(|_| below(&mut g, 10) as i64).collect();
        let b: Vec<i64> = (0..n2).map(|_| below(&mut g, 10) as i64 + shift).collect();
        let exact = exact_p(&a, &b);
        let af: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let bf: Vec<f64> = b.iter().map(|&v| v as f64).collect();
        let mc = match mc_mean_diff_test(&af, &bf, 10_000, 100 + i) {
            Ok(r) => r.p_value,
            Err(e) => return Report::fail(format!("pair {i}: {e}")),
        };
        worst = worst.max((mc - exact).abs());
        if exact < 0.05 {
            small += 1;
        }
    }
    Report::new(
        worst <= 0.02,
        format!("{pairs} integer pairs (n ≤ 8 + 8, {small} with exact p < 0.05), 10000 resamples, max |p_mc − p_exact| = {worst:.4} (tol 0.02)"),
    )
}

// ---------------------------------------------------------------------------
// 2. Lexicon means against the published tables (needs external data)

const PUBLISHED: [(&str, &str, [f64; 3]); 6] = [
    ("hiv_positive", "SENTISHIFT_LIST_HIV_POSITIVE", [0.757, 0.485, 0.675]),
    ("lm_positive", "SENTISHIFT_LIST_LM_POSITIVE", [0.852, 0.575, 0.764]),
    ("rss_approach", "SENTISHIFT_LIST_RSS_APPROACH", [0.860, 0.651, 0.749]),
    ("hiv_negative", "SENTISHIFT_LIST_HIV_NEGATIVE", [0.251, 0.605, 0.397]),
    ("lm_negative", "SENTISHIFT_LIST_LM_NEGATIVE", [0.234, 0.593, 0.384]),
    ("rss_avoidance", "SENTISHIFT_LIST_RSS_AVOIDANCE", [0.178, 0.729, 0.357]),
];

fn lexicon_means() -> Report {
    let Some(vad) = std::env::var_os("SENTISHIFT_NRC_VAD").map(PathBuf::from) else {
        return Report::not_run("data not supplied (set SENTISHIFT_NRC_VAD and SENTISHIFT_LIST_*)");
    };
    let lists: Vec<(&str, PathBuf, [f64; 3])> = PUBLISHED
        .iter()
        .filter_map(|(name, var, want)| std::env::var_os(var).map(|p| (*name, PathBuf::from(p), *want)))
        .collect();
    if lists.is_empty() {
        return Report::not_run("no word-list supplied (set SENTISHIFT_LIST_*)");
    }
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toml::Table::new();
    let mut l = toml::Table::new();
    for (name, path, _) in &lists {
        l.insert(name.to_string(), path.display().to_string().into());
    }
    cfg.insert("lists".into(), l.into());
    let mut t = toml::Table::new();
    t.insert("vad".into(), vad.display().to_string().into());
    cfg.insert("tables".into(), t.into());
    let cfg_path = dir.path().join("lexstat.toml");
    fs::write(&cfg_path, toml::to_string(&cfg).unwrap()).unwrap();
    let out = dir.path().join("out");
    if let Err(e) = run_bin(&["lexstat", "--config", path_str(&cfg_path), "--out", path_str(&out)]) {
        return Report::fail(e);
    }
    let mut rdr = csv::Reader::from_path(out.join("lexstat/means.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_lowercase).collect();
    let col = |f: &str| header.iter().position(|h| h == f);
    let (Some(v), Some(a), Some(d)) = (col("valence"), col("arousal"), col("dominance")) else {
        return Report::fail(format!("means.csv lacks valence/arousal/dominance columns: {header:?}"));
    };
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let Some((_, _, want)) = lists.iter().find(|(n, _, _)| *n == &rec[0]) else {
            continue;
        };
        let got: Vec<f64> = [v, a, d].iter().map(|&j| rec[j].parse().unwrap()).collect();
        let dev = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        notes.push(format!(
            "{}: V {:.3} A {:.3} D {:.3} (published {:.3} {:.3} {:.3}), coverage {}",
            &rec[0], got[0], got[1], got[2], want[0], want[1], want[2], &rec[3]
        ));
    }
    let mut r = Report::new(
        worst <= 0.02,
        format!("{} lists, max deviation from published means {worst:.3} (tol 0.02; depends on list/table versions)", lists.len()),
    );
    r.notes = notes;
    r
}

// ---------------------------------------------------------------------------
// 3. Feature regressors: planted linear map and shuffled control

const N_FEATURES: usize = 65;

/// Ratings `3.5 + Σ c_k x_k` with `Σ|c_k| = 3` on uniform embeddings, so no
/// rating leaves the scale.
fn planted_tables(n: usize, d: usize, seed: u64) -> (RatingTable, EmbeddingTable, Vec<Vec<f64>>) {
    let mut g = stream_rng(seed, 0);
    let coefs: Vec<Vec<f64>> = (0..N_FEATURES)
        .map(|_| {
            let raw: Vec<f64> = (0..d).map(|_| 2.0 * uniform(&mut g) - 1.0).collect();
            let norm: f64 = raw.iter().map(|c| c.abs()).sum();
            raw.iter().map(|c| 3.0 * c / norm).collect()
        })
        .collect();
    let names: Vec<String> = (0..N_FEATURES).map(|j| format!("f{j:02}")).collect();
    let mut emb = EmbeddingTable::new(d);
    let mut ratings = Vec::new();
    for i in 0..n {
        let x: Vec<f64> = (0..d).map(|_| 2.0 * uniform(&mut g) - 1.0).collect();
        emb.insert(&format!("w{i}"), &x).unwrap();
        ratings.push(
            coefs
                .iter()
                .map(|c| 3.5 + c.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>())
                .collect::<Vec<f64>>(),
        );
    }
    let table = rating_table(&names, &ratings);
    (table, emb, ratings)
}

fn rating_table(names: &[String], rows: &[Vec<f64>]) -> RatingTable {
    let mut t = RatingTable::new(names.to_vec(), Scale::BINDER).unwrap();
    for (i, r) in rows.iter().enumerate() {
        t.insert(&format!("w{i}"), r.clone()).unwrap();
    }
    t
}

fn parallel_cv(t: &RatingTable, e: &EmbeddingTable, cfg: &NetworkConfig, seed: u64) -> sentishift_core::Result<CrossValidation> {
    cross_validate_with(t, e, cfg, 5, seed, |tr| {
        (0..tr.n_features()).into_par_iter().map(|j| tr.train_feature(j)).collect()
    })
}

fn feature_extrapolation() -> Report {
    let cfg = NetworkConfig {
        hidden_units: 32,
        max_epochs: 300,
        patience: 20,
        learning_rate: 3e-3,
        min_training_words: 10,
        ..NetworkConfig::default()
    };
    let (n, d) = (400, 8);
    let (table, emb, ratings) = planted_tables(n, d, 3);
    let planted = match parallel_cv(&table, &emb, &cfg, 31) {
        Ok(cv) => cv,
        Err(e) => return Report::fail(format!("planted map: {e}")),
    };
    let min_r = planted.mean_r.iter().copied().fold(f64::INFINITY, f64::min);

    // Each feature column permuted independently across words.
    let mut shuffled = ratings.clone();
    for j in 0..N_FEATURES {
        let mut col: Vec<f64> = ratings.iter().map(|r| r[j]).collect();
        shuffle(&mut stream_rng(32, j as u64), &mut col);
        for (row, v) in shuffled.iter_mut().zip(col) {
            row[j] = v;
        }
    }
    let names: Vec<String> = table.features().to_vec();
    let control = match parallel_cv(&rating_table(&names, &shuffled), &emb, &cfg, 33) {
        Ok(cv) => cv,
        Err(e) => return Report::fail(format!("shuffled control: {e}")),
    };
    let control_mean = control.mean_r.iter().sum::<f64>() / N_FEATURES as f64;
    Report::new(
        min_r > 0.99 && control_mean.abs() < 0.05,
        format!(
            "{n} words × {N_FEATURES} features, 5-fold: planted min r = {min_r:.4} (need > 0.99); shuffled mean r = {control_mean:+.4} (need |r| < 0.05)"
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. PCA and k-means

fn feature_matrix(rows: &[Vec<f64>], names: &[&str]) -> FeatureMatrix {
    let words: Vec<String> = (0..rows.len()).map(|i| format!("w{i:03}")).collect();
    FeatureMatrix::new(
        words,
        names.iter().map(|s| s.to_string()).collect(),
        Matrix::from_rows(rows),
        Scale::BINDER,
    )
    .unwrap()
}

const SPLIT_FEATURES: [&str; 4] = ["Fearful", "Surprised", "Cognition", "Drive"];

fn blob_split(seed: u64) -> (Vec<u8>, Vec<usize>) {
    let mut g = stream_rng(seed, 0);
    let centers = [[2.0, 2.0, 5.0, 5.0], [5.0, 5.0, 2.0, 2.0]];
    let rows: Vec<Vec<f64>> = (0..60)
        .map(|i| centers[i % 2].iter().map(|c| c + 0.2 * standard_normal(&mut g)).collect())
        .collect();
    let m = feature_matrix(&rows, &SPLIT_FEATURES);
    let pca = pca_project(&m, &SPLIT_FEATURES, 2).unwrap();
    let km = kmeans_cluster(&pca.words, &pca.scores, 2, 100, seed).unwrap();
    let bytes = serde_json::to_vec(&(&pca, &km)).unwrap();
    (bytes, km.labels)
}

fn pca_kmeans() -> Report {
    let mut notes = Vec::new();

    let mut g = stream_rng(40, 0);
    let slopes = [0.8, -0.5, 1.2, 0.3];
    let rows: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let z = 2.0 * uniform(&mut g) - 1.0;
            slopes.iter().map(|b| 3.5 + b * z).collect()
        })
        .collect();
    let pca = pca_project(&feature_matrix(&rows, &SPLIT_FEATURES), &SPLIT_FEATURES, 1).unwrap();
    let rank_one = 1.0 - pca.explained[0] <= 1e-12;
    notes.push(format!("rank-1: first component explains {:.15}", pca.explained[0]));

    let (bytes, labels) = blob_split(41);
    let first = labels[0];
    let recovered = labels
        .iter()
        .enumerate()
        .all(|(i, &l)| (l == first) == (i % 2 == 0));
    notes.push(format!("two blobs (30 + 30): perfect recovery {recovered}"));
    let (again, _) = blob_split(41);
    let identical = bytes == again;
    notes.push(format!("rerun with the same seed byte-identical: {identical}"));

    let mut ok = rank_one && recovered && identical;
    match std::env::var_os("SENTISHIFT_AVOIDANCE_FEATURES") {
        None => notes.push("88% two-component check NOT RUN (predicted avoidance features not supplied)".into()),
        Some(p) => match read_feature_matrix("split", Path::new(&p), Scale::BINDER)
            .map_err(|e| e.to_string())
            .and_then(|m| pca_project(&m, &SPLIT_FEATURES, 2).map_err(|e| e.to_string()))
        {
            Ok(r) => {
                let total = r.explained_total();
                let close = (total - 0.88).abs() <= 0.05;
                ok &= close;
                notes.push(format!("avoidance list: two components explain {:.1}% (published 88% ± 5pp): {close}", 100.0 * total));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("avoidance features: {e}"));
            }
        },
    }
    let mut r = Report::new(ok, "rank-1 variance, two-blob recovery, byte-identical rerun");
    r.notes = notes;
    r
}

// ---------------------------------------------------------------------------
// 5. Sentiment index

fn hand_fixture(dir: &Path) -> PathBuf {
    fs::write(dir.join("pos.txt"), "gain\nprofit\n").unwrap();
    fs::write(dir.join("neg.txt"), "loss\nfear\n").unwrap();
    // A: 4 tokens, 1 positive → 1/4. B: 2 tokens, 2 negative → −1.
    // C: 8 tokens, 3 positive, 1 negative → 2/8.
    let corpus = [
        r#"{"id": 1, "date": "2020-01-03", "tags": ["NY"], "text": "Gain in the quarter."}"#,
        r#"{"id": 2, "date": "2020-01-20", "tags": ["NY"], "text": "Fear, loss."}"#,
        r#"{"id": 3, "date": "2020-02-11", "tags": ["NY"], "text": "Gain, profit and more gain offset one loss"}"#,
    ];
    fs::write(dir.join("corpus.jsonl"), corpus.join("\n") + "\n").unwrap();
    let cfg = dir.join("index.toml");
    fs::write(
        &cfg,
        r#"
[lists]
pos = "pos.txt"
neg = "neg.txt"

[index]
corpus = "corpus.jsonl"

[[index.indices]]
name = "hand"
positive = "pos"
negative = "neg"
"#,
    )
    .unwrap();
    cfg
}

fn random_corpus(seed: u64) -> Vec<Article> {
    let mut g = stream_rng(seed, 0);
    let n = 5 + below(&mut g, 40);
    (0..n)
        .map(|i| {
            let len = below(&mut g, 30);
            let text: Vec<String> = (0..len).map(|_| format!("v{}", below(&mut g, 30))).collect();
            Article {
                id: i.to_string(),
                date: Date::new(2021, 1 + below(&mut g, 6) as u8, 1 + below(&mut g, 28) as u8).unwrap(),
                tags: vec![],
                text: text.join(" "),
            }
        })
        .collect()
}

fn sentiment_index() -> Report {
    let mut notes = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let cfg = hand_fixture(dir.path());
    let mut hand_ok = true;
    for (weighting, jan, feb) in [("unweighted", (0.25 - 1.0) / 2.0, 0.25), ("length", -1.0 / 6.0, 2.0 / 8.0)] {
        let out = dir.path().join(weighting);
        if let Err(e) = run_bin(&["index", "--config", path_str(&cfg), "--out", path_str(&out), "--weighting", weighting]) {
            return Report::fail(e);
        }
        let got = fs::read_to_string(out.join("index/hand.csv")).unwrap();
        let want = format!("month,value,article_count\n2020-01,{jan},2\n2020-02,{feb},1\n");
        let same = got == want;
        hand_ok &= same;
        notes.push(format!("3-article fixture, {weighting}: Jan {jan}, Feb {feb}, exact match {same}"));
    }

    let words: Vec<String> = (0..30).map(|i| format!("v{i}")).collect();
    let pos = WordList::new("pos", &words[0..8]).unwrap();
    let neg = WordList::new("neg", &words[6..16]).unwrap();
    let (mut negated, mut reordered, mut cases) = (0, 0, 0);
    for s in 0..1000 {
        let corpus = random_corpus(s);
        let w = if s % 2 == 0 { Weighting::Unweighted } else { Weighting::Length };
        let fwd = ScoringLexicon::new(&pos, &neg, ScoreMode::Both);
        let rev = ScoringLexicon::new(&neg, &pos, ScoreMode::Both);
        let Ok(a) = build_monthly_index(&corpus, &fwd, w, "x") else {
            continue; // every article empty
        };
        cases += 1;
        let b = build_monthly_index(&corpus, &rev, w, "x").unwrap();
        if a.months == b.months && a.values.iter().zip(&b.values).all(|(x, y)| *x == -*y) {
            negated += 1;
        }
        let mut shuffled = corpus.clone();
        shuffle(&mut stream_rng(s, 1), &mut shuffled);
        let c = build_monthly_index(&shuffled, &fwd, w, "x").unwrap();
        if c == a {
            reordered += 1;
        }
    }
    notes.push(format!(
        "{cases} random corpora: list swap negates exactly in {negated}, shuffled order identical in {reordered}"
    ));
    let ok = hand_ok && cases >= 1000 && negated == cases && reordered == cases;
    let mut r = Report::new(ok, "hand fixture and randomized properties");
    r.notes = notes;
    r
}

// ---------------------------------------------------------------------------
// 6. Econometrics

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("y{i}")).collect()
}

/// Textbook Cholesky, independent of the library's.
fn cholesky_oracle(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            l[(i, j)] = if i == j {
                (a[(i, i)] - s).sqrt()
            } else {
                (a[(i, j)] - s) / l[(j, j)]
            };
        }
    }
    l
}

struct RandomModel {
    var: VarForm,
    impact: CholeskyImpact,
    sigma: Matrix,
}

fn random_models() -> Vec<RandomModel> {
    (0..100)
        .map(|s| {
            let mut g = stream_rng(60, s);
            let k = 2 + below(&mut g, 4);
            let lag = 1 + below(&mut g, 3);
            let var = random_stable_var(k, lag, 0.9, &mut g);
            let sigma = random_covariance(k, &mut g);
            let impact = cholesky_impact(&sigma).unwrap();
            RandomModel { var, impact, sigma }
        })
        .collect()
}

fn sub(notes: &mut Vec<String>, ok: &mut bool, id: &str, pass: bool, detail: String) {
    *ok &= pass;
    notes.push(format!("6{id} {} {detail}", if pass { "PASS" } else { "FAIL" }));
}

/// Levels VAR of the bivariate rank-1 VECM α = (−0.2, 0.1)ᵀ, β = (1, −1)ᵀ,
/// Γ1 = [[0.3, 0.1], [0, 0.2]].
fn rank_one_dgp() -> (VarForm, Matrix) {
    let alpha = [-0.2, 0.1];
    let gamma = [[0.3, 0.1], [0.0, 0.2]];
    let mut a1 = Matrix::identity(2);
    let mut a2 = Matrix::zeros(2, 2);
    for i in 0..2 {
        a1[(i, 0)] += alpha[i];
        a1[(i, 1)] -= alpha[i];
        for j in 0..2 {
            a1[(i, j)] += gamma[i][j];
            a2[(i, j)] = -gamma[i][j];
        }
    }
    let var = VarForm {
        intercept: vec![0.05, 0.02],
        coefs: vec![a1, a2],
    };
    (var, Matrix::from_rows(&[[1.0, 0.0], [0.4, 0.9]]))
}

fn econometrics() -> Report {
    let mut notes = Vec::new();
    let mut ok = true;
    let models = random_models();
    let horizon = 20;

    // (a) FEVD rows sum to one.
    let mut worst = 0.0f64;
    for m in &models {
        let theta = impulse_response_from(&m.var, &m.impact, horizon - 1).unwrap();
        let f = fevd_from(&theta, names(m.var.dim()));
        for s in &f.shares {
            for i in 0..s.rows() {
                worst = worst.max((s.row(i).iter().sum::<f64>() - 1.0).abs());
            }
        }
    }
    sub(&mut notes, &mut ok, "a", worst <= 1e-8, format!("FEVD: 100 random stable models, max |Σ share − 1| = {worst:.1e} (tol 1e-8)"));

    // (b) Horizon 0 is the Cholesky factor, column by column.
    let mut exact = 0;
    let mut factor_dev = 0.0f64;
    for m in &models {
        let theta = impulse_response_from(&m.var, &m.impact, 0).unwrap();
        if theta[0].data() == m.impact.matrix.data() {
            exact += 1;
        }
        factor_dev = factor_dev.max(m.impact.matrix.max_abs_diff(&cholesky_oracle(&m.sigma)));
    }
    sub(
        &mut notes,
        &mut ok,
        "b",
        exact == models.len() && factor_dev <= 1e-12,
        format!("IRF h=0: equals the impact matrix exactly in {exact}/100; impact vs textbook Cholesky max diff {factor_dev:.1e}"),
    );

    // (c) VECM and its levels VAR give the same fitted values.
    let mut g = stream_rng(62, 0);
    let pair = cointegrated_pair(400, 0.5, 0.0, &mut g);
    let mut ar = 0.0;
    let data = Matrix::from_fn(400, 3, |t, j| {
        if j < 2 {
            pair[(t, j)]
        } else {
            ar = 0.5 * ar + standard_normal(&mut g);
            ar
        }
    });
    let specs = [
        VecmSpec { lag: 2, rank: 1, stationary: vec!["y2".into()] },
        VecmSpec { lag: 3, rank: 1, stationary: vec![] },
        VecmSpec { lag: 1, rank: 0, stationary: vec![] },
        VecmSpec { lag: 2, rank: 2, stationary: vec![] },
    ];
    let mut dev = 0.0f64;
    let mut fitted: Vec<VecmModel> = Vec::new();
    for spec in &specs {
        let m = match estimate_vecm_on(&data, &names(3), spec) {
            Ok(m) => m,
            Err(e) => return Report::fail(format!("6c: {spec:?}: {e}")),
        };
        let var = vecm_to_var(&m);
        for t in m.lag..data.rows() {
            let a = m.one_step(&data, t);
            let b = var.one_step(&data, t);
            for j in 0..3 {
                let from_resid = data[(t, j)] - m.residuals[(t - m.lag, j)];
                dev = dev.max((a[j] - b[j]).abs()).max((b[j] - from_resid).abs());
            }
        }
        fitted.push(m);
    }
    sub(&mut notes, &mut ok, "c", dev <= 1e-10, format!("VECM ↔ VAR: 4 specifications, max fitted-value diff {dev:.1e} (tol 1e-10)"));

    // (d) Responses equal shocked minus baseline deterministic paths.
    let mut dev = 0.0f64;
    let mut cases: Vec<(VarForm, CholeskyImpact)> = models.iter().map(|m| (m.var.clone(), m.impact.clone())).collect();
    for m in &fitted {
        cases.push((vecm_to_var(m), cholesky_impact(&m.sigma).unwrap()));
    }
    for (c, (var, impact)) in cases.iter().enumerate() {
        let (k, p) = (var.dim(), var.lag());
        let theta = impulse_response_from(var, impact, horizon).unwrap();
        let mut g = stream_rng(63, c as u64);
        let history = Matrix::from_fn(p, k, |_, _| standard_normal(&mut g));
        let zeros = vec![vec![0.0; k]; horizon + 1];
        let base = deterministic_path(var, &history, &zeros);
        for j in 0..k {
            let mut innov = zeros.clone();
            innov[0] = impact.matrix.col(j);
            let shocked = deterministic_path(var, &history, &innov);
            for (h, th) in theta.iter().enumerate() {
                for i in 0..k {
                    dev = dev.max((shocked[(h, i)] - base[(h, i)] - th[(i, j)]).abs());
                }
            }
        }
    }
    sub(
        &mut notes,
        &mut ok,
        "d",
        dev <= 1e-8,
        format!("IRF vs shocked-path simulation: {} models, horizons 0..{horizon}, max diff {dev:.1e} (tol 1e-8)", cases.len()),
    );

    // (e) Johansen rank recovery. The model has an unrestricted constant,
    // whose trace quantiles assume the common trend drifts; without drift
    // the last test over-rejects (reported, not checked).
    let ranks = |f: &(dyn Fn(u64) -> Matrix + Sync)| -> Vec<usize> {
        (0..200u64)
            .into_par_iter()
            .map(|s| johansen_trace(&f(s), 2).map_or(usize::MAX, |r| r.rank))
            .collect()
    };
    let count = |v: Vec<usize>, r: usize| v.iter().filter(|&&x| x == r).count();
    let one = count(ranks(&|s| cointegrated_pair(500, 0.5, 0.5, &mut stream_rng(64, s))), 1);
    let zero = count(ranks(&|s| random_walks(500, 2, 0.5, &mut stream_rng(65, s))), 0);
    let one_flat = count(ranks(&|s| cointegrated_pair(500, 0.5, 0.0, &mut stream_rng(64, s))), 1);
    sub(
        &mut notes,
        &mut ok,
        "e",
        one >= 170 && zero >= 180,
        format!(
            "Johansen (n=500, lag 2, 200 sims, drift 0.5): rank 1 found in {one}/200 planted (need ≥ 170); \
             rank 0 in {zero}/200 independent walks (need ≥ 180); driftless planted: {one_flat}/200 (informational)"
        ),
    );

    // (f) ADF size and power.
    let adf = |f: &(dyn Fn(u64) -> Vec<f64> + Sync)| -> usize {
        (0..200u64)
            .into_par_iter()
            .filter(|&s| adf_test(&f(s), 12, Deterministic::Constant).is_ok_and(|r| r.rejected_at_5pct))
            .count()
    };
    let walk_reject = adf(&|s| {
        let mut g = stream_rng(66, s);
        let mut x = 0.0;
        (0..500).map(|_| {
            x += standard_normal(&mut g);
            x
        }).collect()
    });
    let noise_reject = adf(&|s| {
        let mut g = stream_rng(67, s);
        (0..500).map(|_| standard_normal(&mut g)).collect()
    });
    sub(
        &mut notes,
        &mut ok,
        "f",
        200 - walk_reject >= 180 && noise_reject >= 190,
        format!(
            "ADF (n=500, 200 sims): random walk not rejected in {}/200 (need ≥ 180); white noise rejected in {noise_reject}/200 (need ≥ 190)",
            200 - walk_reject
        ),
    );

    // (g) Hall bootstrap coverage of the true responses at horizon 5.
    let (var, chol) = rank_one_dgp();
    let truth = impulse_response_from(&var, &CholeskyImpact { matrix: chol.clone(), ridge: 0.0 }, 5).unwrap()[5].clone();
    let spec = VecmSpec { lag: 2, rank: 1, stationary: vec![] };
    let covered: Vec<Result<[[bool; 2]; 2], String>> = (0..100u64)
        .into_par_iter()
        .map(|s| {
            let y = simulate_var(&var, &chol, &Matrix::zeros(2, 2), 500, 100, &mut stream_rng(600, s));
            let m = estimate_vecm_on(&y, &names(2), &spec).map_err(|e| e.to_string())?;
            let irf = hall_bootstrap_irf(&m, &y, 999, 0.95, 5, s).map_err(|e| e.to_string())?;
            let b = irf.bands.unwrap();
            let mut c = [[false; 2]; 2];
            for (i, row) in c.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell = b.lower[5][(i, j)] <= truth[(i, j)] && truth[(i, j)] <= b.upper[5][(i, j)];
                }
            }
            Ok(c)
        })
        .collect();
    let mut counts = [[0usize; 2]; 2];
    for c in &covered {
        match c {
            Ok(c) => {
                for i in 0..2 {
                    for j in 0..2 {
                        counts[i][j] += usize::from(c[i][j]);
                    }
                }
            }
            Err(e) => return Report::fail(format!("6g: {e}")),
        }
    }
    let in_range = counts.iter().flatten().all(|&c| (90..=99).contains(&c));
    let mut shown = String::new();
    for (i, row) in counts.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let _ = write!(shown, "{}y{i}←y{j} {c}", if shown.is_empty() { "" } else { ", " });
        }
    }
    sub(
        &mut notes,
        &mut ok,
        "g",
        in_range,
        format!("Hall 95% bands, 100 DGPs (n=500, 999 replications), true IRF at h=5 covered: {shown} (need 90..=99 each)"),
    );

    let mut r = Report::new(ok, "FEVD, impact, VECM↔VAR, shocked paths, Johansen, ADF, bootstrap coverage");
    r.notes = notes;
    r
}

// ---------------------------------------------------------------------------
// 7. End-to-end determinism

const PIPELINE: [&[&str]; 11] = [
    &["features", "train"],
    &["features", "predict"],
    &["features", "crossval"],
    &["lexstat"],
    &["split"],
    &["index"],
    &["econ", "adf"],
    &["econ", "johansen"],
    &["econ", "vecm"],
    &["econ", "irf"],
    &["econ", "fevd"],
];

fn fixture_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic/sentishift.toml")
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Report {
    let cfg = fixture_config();
    if !cfg.exists() {
        return Report::fail(format!("fixture missing: {}", cfg.display()));
    }
    let dir = tempfile::tempdir().unwrap();
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        for stage in PIPELINE {
            let mut args: Vec<&str> = stage.to_vec();
            args.extend(["--config", path_str(&cfg), "--out", path_str(&out)]);
            if let Err(e) = run_bin(&args) {
                return Report::fail(e);
            }
        }
        trees.push(tree(&out));
    }
    let (a, b) = (&trees[0], &trees[1]);
    let differing: Vec<String> = a
        .keys()
        .chain(b.keys())
        .filter(|k| a.get(*k) != b.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    let bytes: usize = a.values().map(Vec::len).sum();
    let manifests = a.keys().filter(|k| k.ends_with("manifest.json")).count();
    let mut r = Report::new(
        differing.is_empty() && manifests == PIPELINE.len(),
        format!(
            "11 stages run twice on the synthetic fixture: {} files ({bytes} bytes, {manifests} manifests), {} differ",
            a.len(),
            differing.len()
        ),
    );
    r.notes = differing.into_iter().take(10).map(|d| format!("differs: {d}")).collect();
    r
}

// ---------------------------------------------------------------------------

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn run_bin(args: &[&str]) -> Result<(), String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "`sentishift {}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}
