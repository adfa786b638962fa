//! Feature-regressor training, prediction and cross-validation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;

use sentishift_core::features::{
    bundle_trainer, cross_validate_with, predict_features, BundleTrainer, FeatureRegressorBundle, Regressor,
    BUNDLE_FORMAT_VERSION,
};
use sentishift_core::Scale;

use super::{dirs, load_list, require_table};
use crate::config::Resolved;
use crate::error::{CliError, Result, StageContext};
use crate::formats::{read_embeddings, read_json, read_rating_table, write_csv_rows, write_feature_matrix, write_json};
use crate::manifest::StageDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeaturesAction {
    Train,
    Predict,
    Crossval,
}

pub fn features(r: &Resolved, action: FeaturesAction) -> Result<PathBuf> {
    match action {
        FeaturesAction::Train => train(r),
        FeaturesAction::Predict => predict(r),
        FeaturesAction::Crossval => crossval(r),
    }
}

/// Per-feature jobs run concurrently; each uses its own seeded stream, so the
/// result equals a sequential run.
fn train_parallel(t: &BundleTrainer) -> sentishift_core::Result<Vec<Regressor>> {
    (0..t.n_features()).into_par_iter().map(|j| t.train_feature(j)).collect()
}

fn train(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "features train";
    let seed = r.stage_seed("features/train");
    let binder_path = require_table(STAGE, &r.config.tables.binder, "tables.binder")?;
    let emb_path = require_table(STAGE, &r.config.tables.embeddings, "tables.embeddings")?;
    let binder = read_rating_table(STAGE, binder_path, Scale::BINDER)?;
    let emb = read_embeddings(STAGE, emb_path)?;
    let config = r.config.features.network.resolve();
    let trainer = bundle_trainer(&binder, &emb, &config, seed).stage(STAGE)?;
    log::info!("{STAGE}: {} features on {} words", trainer.n_features(), trainer.n_words());
    let regs = train_parallel(&trainer).stage(STAGE)?;
    let bundle = trainer.finish(regs).stage(STAGE)?;

    let out = StageDir::create(r, STAGE, dirs::FEATURES_TRAIN, Some(seed))?;
    write_json(STAGE, &out.path("bundle.json"), &bundle)?;
    let rows = bundle.regressors.iter().map(|g| {
        vec![
            g.feature.clone(),
            g.validation.mse.to_string(),
            g.validation.correlation.to_string(),
            g.validation.best_epoch.to_string(),
            g.validation.epochs_run.to_string(),
        ]
    });
    write_csv_rows(
        STAGE,
        &out.path("training.csv"),
        &["feature", "validation_mse", "validation_r", "best_epoch", "epochs_run"],
        rows,
    )?;
    out.finish()
}

pub(crate) fn load_bundle(r: &Resolved, stage: &'static str) -> Result<FeatureRegressorBundle> {
    let path = r.out.join(dirs::FEATURES_TRAIN).join("bundle.json");
    if !path.is_file() {
        return Err(CliError::MissingBundle { stage, path });
    }
    let b: FeatureRegressorBundle = read_json(stage, &path)?;
    if b.format_version != BUNDLE_FORMAT_VERSION {
        return Err(CliError::format(
            stage,
            &path,
            None,
            format!("bundle format {} is not supported (expected {BUNDLE_FORMAT_VERSION})", b.format_version),
        ));
    }
    Ok(b)
}

fn predict(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "features predict";
    let bundle = load_bundle(r, STAGE)?;
    let emb_path = require_table(STAGE, &r.config.tables.embeddings, "tables.embeddings")?;
    let emb = read_embeddings(STAGE, emb_path)?;
    let names: Vec<String> = if r.config.features.predict.is_empty() {
        r.config.lists.keys().cloned().collect()
    } else {
        r.config.features.predict.clone()
    };
    if names.is_empty() {
        return Err(CliError::Config(format!("{STAGE}: no word-lists to predict")));
    }
    let mut results = Vec::new();
    for n in &names {
        let list = load_list(r, STAGE, n)?;
        let (m, dropped) = predict_features(&bundle, &list, &emb).stage_at(STAGE, emb_path)?;
        if !dropped.is_empty() {
            log::warn!("{STAGE}: {n}: {} words have no embedding", dropped.len());
        }
        results.push((n, m, dropped));
    }
    let out = StageDir::create(r, STAGE, dirs::FEATURES_PREDICT, Some(bundle.seed))?;
    let mut dropped_all = BTreeMap::new();
    for (n, m, dropped) in results {
        write_feature_matrix(STAGE, &out.path(&format!("{n}.csv")), &m)?;
        dropped_all.insert(n.clone(), dropped);
    }
    write_json(STAGE, &out.path("dropped.json"), &dropped_all)?;
    out.finish()
}

fn crossval(r: &Resolved) -> Result<PathBuf> {
    const STAGE: &str = "features crossval";
    let seed = r.stage_seed("features/crossval");
    let binder_path = require_table(STAGE, &r.config.tables.binder, "tables.binder")?;
    let emb_path = require_table(STAGE, &r.config.tables.embeddings, "tables.embeddings")?;
    let binder = read_rating_table(STAGE, binder_path, Scale::BINDER)?;
    let emb = read_embeddings(STAGE, emb_path)?;
    let config = r.config.features.network.resolve();
    let k = r.config.features.k_folds;
    let cv = cross_validate_with(&binder, &emb, &config, k, seed, train_parallel).stage(STAGE)?;

    let out = StageDir::create(r, STAGE, dirs::FEATURES_CROSSVAL, Some(seed))?;
    let mut header = vec!["feature".to_string(), "mean_r".into()];
    header.extend((1..=cv.fold_r.len()).map(|f| format!("fold_{f}")));
    let rows = cv.features.iter().enumerate().map(|(j, f)| {
        let mut row = vec![f.clone(), cv.mean_r[j].to_string()];
        row.extend(cv.fold_r.iter().map(|fold| fold[j].to_string()));
        row
    });
    write_csv_rows(STAGE, &out.path("crossval.csv"), &header, rows)?;
    write_json(STAGE, &out.path("crossval.json"), &cv)?;
    out.finish()
}
