//! Correlations, PCA and two-cluster split of one list's predicted features.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use sentishift_core::structure::{
    check_kmeans_input, feature_correlations, kmeans_from_runs, kmeans_restart, pca_project, split_word_list,
    ClusterAssignment, PcaResult, TieBreak,
};
use sentishift_core::Scale;

use super::{dirs, load_list, require_upstream};
use crate::config::Resolved;
use crate::error::{CliError, Result, StageContext};
use crate::formats::{read_feature_matrix, write_csv_rows, write_json, write_word_list};
use crate::manifest::{list_hash, StageDir};

const STAGE: &str = "split";
const K: usize = 2;

#[derive(Serialize)]
struct SplitSummary<'a> {
    list: &'a str,
    rated_words: usize,
    pca: &'a PcaResult,
    clusters: &'a ClusterAssignment,
    label_features: &'a [String],
    tie_break: TieBreak,
    alt1: (&'a str, usize, String),
    alt2: (&'a str, usize, String),
}

pub fn split(r: &Resolved) -> Result<PathBuf> {
    let cfg = &r.config.split;
    if cfg.list.is_empty() {
        return Err(CliError::Config("split: `split.list` is not configured".into()));
    }
    let seed = r.stage_seed(STAGE);
    let list = load_list(r, STAGE, &cfg.list)?;
    let path = match &cfg.features {
        Some(p) => p.clone(),
        None => r.out.join(dirs::FEATURES_PREDICT).join(format!("{}.csv", cfg.list)),
    };
    let path = require_upstream(STAGE, path, "run `features predict` first or set split.features")?;
    let full = read_feature_matrix(STAGE, &path, Scale::BINDER)?;
    let matrix = full
        .select_words(list.words().iter().map(String::as_str).filter(|w| full.row_index(w).is_some()))
        .stage_at(STAGE, &path)?;

    let feats: Vec<&str> = cfg.pca_features.iter().map(String::as_str).collect();
    let corr = feature_correlations(&matrix, &feats).stage_at(STAGE, &path)?;
    let pca = pca_project(&matrix, &feats, cfg.n_components).stage_at(STAGE, &path)?;
    check_kmeans_input(&pca.scores, K, cfg.restarts).stage(STAGE)?;
    let runs: Vec<_> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| kmeans_restart(&pca.scores, K, seed, i))
        .collect();
    let clusters = kmeans_from_runs(&pca.words, runs, seed);
    let tie = if cfg.allow_tie { TieBreak::FirstCluster } else { TieBreak::Error };
    let labels: Vec<&str> = cfg.label_features.iter().map(String::as_str).collect();
    let (alt1, alt2) = split_word_list(&list, &clusters, &matrix, &labels, tie).stage(STAGE)?;

    let out = StageDir::create(r, STAGE, dirs::SPLIT, Some(seed))?;
    let mut header = vec!["feature".to_string()];
    header.extend(corr.features.iter().cloned());
    let rows = corr.features.iter().enumerate().map(|(i, f)| {
        let mut row = vec![f.clone()];
        row.extend(corr.values.row(i).iter().map(f64::to_string));
        row
    });
    write_csv_rows(STAGE, &out.path("correlations.csv"), &header, rows)?;

    let mut header = vec!["word".to_string()];
    header.extend((1..=cfg.n_components).map(|c| format!("pc{c}")));
    header.push("cluster".into());
    let rows = pca.words.iter().enumerate().map(|(i, w)| {
        let mut row = vec![w.clone()];
        row.extend(pca.scores.row(i).iter().map(f64::to_string));
        row.push(clusters.labels[i].to_string());
        row
    });
    write_csv_rows(STAGE, &out.path("scores.csv"), &header, rows)?;

    write_word_list(STAGE, &out.path(&format!("{}.txt", alt1.name())), &alt1)?;
    write_word_list(STAGE, &out.path(&format!("{}.txt", alt2.name())), &alt2)?;
    let summary = SplitSummary {
        list: &cfg.list,
        rated_words: matrix.len(),
        pca: &pca,
        clusters: &clusters,
        label_features: &cfg.label_features,
        tie_break: tie,
        alt1: (alt1.name(), alt1.len(), list_hash(alt1.words())),
        alt2: (alt2.name(), alt2.len(), list_hash(alt2.words())),
    };
    write_json(STAGE, &out.path("split.json"), &summary)?;
    out.finish()
}
