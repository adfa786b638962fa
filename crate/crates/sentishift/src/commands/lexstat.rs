//! Per-list rating means, permutation tests against a reference list and
//! the optional valence-matched feature comparison.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use sentishift_core::lexicon::{feature_means, join};
use sentishift_core::resampling::{matched_feature_comparison, mc_mean_diff_test, McTestResult, MatchedComparison};
use sentishift_core::rng::derive_seed;
use sentishift_core::{FeatureMatrix, Matrix, RatedWordSet, Scale};

use super::{dirs, load_list, require_table, require_upstream};
use crate::config::Resolved;
use crate::error::{CliError, Result, StageContext};
use crate::formats::{read_feature_matrix, read_rating_table, write_csv_rows, write_json};
use crate::manifest::{list_hash, StageDir};

const STAGE: &str = "lexstat";

#[derive(Serialize)]
struct ListSummary {
    list: String,
    words: usize,
    rated: usize,
    coverage: f64,
    list_sha256: String,
    means: Vec<f64>,
    dropped: Vec<String>,
}

#[derive(Serialize)]
struct Comparison {
    group: String,
    list: String,
    reference: String,
    feature: String,
    mean: f64,
    reference_mean: f64,
    test: McTestResult,
}

#[derive(Serialize)]
struct Report<'a> {
    table: &'a str,
    features: &'a [String],
    lists: Vec<ListSummary>,
    comparisons: Vec<Comparison>,
    matched: Option<MatchedComparison>,
}

pub fn lexstat(r: &Resolved) -> Result<PathBuf> {
    let cfg = &r.config.lexstat;
    let seed = r.stage_seed(STAGE);
    let vad_path = require_table(STAGE, &r.config.tables.vad, "tables.vad")?;
    let table = read_rating_table(STAGE, vad_path, Scale::VAD)?;
    if r.config.lists.is_empty() {
        return Err(CliError::Config("lexstat: no word-lists configured".into()));
    }
    let features = table.features().to_vec();

    let mut sets: Vec<(String, RatedWordSet)> = Vec::new();
    let mut lists = Vec::new();
    for name in r.config.lists.keys() {
        let list = load_list(r, STAGE, name)?;
        let set = join(&list, &table).stage_at(STAGE, vad_path)?;
        lists.push(ListSummary {
            list: name.clone(),
            words: list.len(),
            rated: set.len(),
            coverage: set.coverage(),
            list_sha256: list_hash(list.words()),
            means: feature_means(&set).stage(STAGE)?,
            dropped: set.dropped().to_vec(),
        });
        sets.push((name.clone(), set));
    }
    let set_of = |n: &str| &sets.iter().find(|(k, _)| k == n).expect("validated list").1;

    if cfg.groups.is_empty() {
        log::warn!("lexstat: no comparison groups configured; writing means only");
    }
    let mut jobs = Vec::new();
    for g in &cfg.groups {
        for c in g.compare.iter().filter(|c| **c != g.reference) {
            for (j, f) in features.iter().enumerate() {
                jobs.push((g, c, j, f));
            }
        }
    }
    let comparisons = jobs
        .par_iter()
        .map(|&(g, c, j, f)| {
            let a = column(set_of(c), j);
            let b = column(set_of(&g.reference), j);
            let s = derive_seed(seed, &format!("{}/{c}/{f}", g.name));
            let test = mc_mean_diff_test(&a, &b, cfg.resamples, s).stage(STAGE)?;
            Ok(Comparison {
                group: g.name.clone(),
                list: c.clone(),
                reference: g.reference.clone(),
                feature: f.clone(),
                mean: mean(&a),
                reference_mean: mean(&b),
                test,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let matched = match &cfg.matched {
        None => None,
        Some(m) => {
            let paths: Vec<PathBuf> = if m.features.is_empty() {
                let dir = r.out.join(dirs::FEATURES_PREDICT);
                vec![dir.join(format!("{}.csv", m.target)), dir.join(format!("{}.csv", m.source))]
            } else {
                m.features.clone()
            };
            let mut mats = Vec::new();
            for p in paths {
                let p = require_upstream(STAGE, p, "run `features predict` first or set lexstat.matched.features")?;
                mats.push(read_feature_matrix(STAGE, &p, Scale::BINDER)?);
            }
            let fm = stack(&mats).stage(STAGE)?;
            let mc = matched_feature_comparison(
                set_of(&m.target),
                set_of(&m.source),
                &cfg.valence_feature,
                &fm,
                m.repeats,
                m.buckets,
                derive_seed(seed, "matched"),
            )
            .stage(STAGE)?;
            Some(mc)
        }
    };

    let out = StageDir::create(r, STAGE, dirs::LEXSTAT, Some(seed))?;
    let mut header = vec!["list".to_string(), "words".into(), "rated".into(), "coverage".into()];
    header.extend(features.iter().cloned());
    let rows = lists.iter().map(|l| {
        let mut row = vec![l.list.clone(), l.words.to_string(), l.rated.to_string(), l.coverage.to_string()];
        row.extend(l.means.iter().map(f64::to_string));
        row
    });
    write_csv_rows(STAGE, &out.path("means.csv"), &header, rows)?;

    for g in &cfg.groups {
        let rows = comparisons.iter().filter(|c| c.group == g.name).map(|c| {
            vec![
                c.list.clone(),
                c.reference.clone(),
                c.feature.clone(),
                c.mean.to_string(),
                c.reference_mean.to_string(),
                c.test.observed_diff.to_string(),
                c.test.p_value.to_string(),
                c.test.n_resamples.to_string(),
            ]
        });
        write_csv_rows(
            STAGE,
            &out.path(&format!("comparison_{}.csv", g.name)),
            &["list", "reference", "feature", "mean", "reference_mean", "diff", "p_value", "resamples"],
            rows,
        )?;
    }
    if let Some(m) = &matched {
        let rows = m.features.iter().map(|f| {
            vec![
                f.feature.clone(),
                f.target_mean.to_string(),
                f.matched_source_mean.to_string(),
                f.p_value.to_string(),
            ]
        });
        write_csv_rows(
            STAGE,
            &out.path("matched.csv"),
            &["feature", "target_mean", "matched_source_mean", "p_value"],
            rows,
        )?;
    }
    let report = Report {
        table: "vad",
        features: &features,
        lists,
        comparisons,
        matched,
    };
    write_json(STAGE, &out.path("lexstat.json"), &report)?;
    out.finish()
}

fn column(set: &RatedWordSet, j: usize) -> Vec<f64> {
    set.rows().iter().map(|(_, v)| v[j]).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Concatenates matrices with identical features; repeated words keep their
/// first row.
fn stack(mats: &[FeatureMatrix]) -> sentishift_core::Result<FeatureMatrix> {
    let first = &mats[0];
    let mut words = Vec::new();
    let mut data = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for m in mats {
        if m.features() != first.features() {
            return Err(sentishift_core::Error::InvalidConfig(
                "feature matrices have different columns".into(),
            ));
        }
        for (i, w) in m.words().iter().enumerate() {
            if seen.insert(w.clone()) {
                words.push(w.clone());
                data.extend_from_slice(m.values().row(i));
            }
        }
    }
    let n = words.len();
    FeatureMatrix::new(words, first.features().to_vec(), Matrix::from_vec(n, first.features().len(), data), first.scale())
}
