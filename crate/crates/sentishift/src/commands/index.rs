//! Monthly sentiment indices from a streamed JSON-lines corpus.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use sentishift_core::sentiment::{
    article_sentiment, tokenize, ArticleScore, MonthlyIndexBuilder, ScoringLexicon, SeriesMeta, Weighting,
};
use sentishift_core::Error as CoreError;

use super::{dirs, load_any_list};
use crate::config::Resolved;
use crate::error::{CliError, Result, StageContext};
use crate::formats::{write_json, write_series, CorpusReader};
use crate::manifest::{list_hash, StageDir};

const STAGE: &str = "index";
const CHUNK: usize = 4096;

#[derive(Serialize)]
struct Sidecar<'a> {
    #[serde(flatten)]
    meta: &'a SeriesMeta,
    aggregation: &'static str,
    positive_sha256: String,
    negative_sha256: String,
    tags: &'a [String],
    articles_read: u64,
    articles_matched: u64,
    months: usize,
    missing_months: Vec<String>,
}

pub fn index(r: &Resolved) -> Result<PathBuf> {
    let cfg = &r.config.index;
    let corpus = cfg
        .corpus
        .as_deref()
        .ok_or_else(|| CliError::Config("index: `index.corpus` is not configured".into()))?;
    if cfg.indices.is_empty() {
        return Err(CliError::Config("index: no indices configured".into()));
    }
    let mut lexicons = Vec::new();
    let mut hashes = Vec::new();
    for ix in &cfg.indices {
        let pos = load_any_list(r, STAGE, &ix.positive)?;
        let neg = load_any_list(r, STAGE, &ix.negative)?;
        let lex = ScoringLexicon::new(&pos, &neg, ix.mode);
        let overlap = lex.overlap();
        if !overlap.is_empty() {
            log::warn!("index: {}: {} words on both lists are ignored", ix.name, overlap.len());
        }
        hashes.push((list_hash(pos.words()), list_hash(neg.words())));
        lexicons.push(lex);
    }
    let mut builders: Vec<MonthlyIndexBuilder<'_>> =
        lexicons.iter().map(|l| MonthlyIndexBuilder::new(l, cfg.weighting)).collect();

    // Tokenization and scoring run in parallel per chunk; the monthly
    // reduction is an exact integer merge, so order does not matter.
    let mut reader = CorpusReader::open(STAGE, corpus)?;
    let (mut read, mut matched) = (0u64, 0u64);
    loop {
        let chunk = reader.next_chunk(CHUNK)?;
        if chunk.is_empty() {
            break;
        }
        read += chunk.len() as u64;
        let kept: Vec<_> = chunk.iter().filter(|a| a.has_any_tag(&cfg.tags)).collect();
        matched += kept.len() as u64;
        let scored: Vec<Vec<sentishift_core::Result<ArticleScore>>> = kept
            .par_iter()
            .map(|a| {
                let toks = tokenize(&a.text);
                lexicons.iter().map(|l| article_sentiment(&toks, l)).collect()
            })
            .collect();
        for (a, scores) in kept.iter().zip(scored) {
            for (b, s) in builders.iter_mut().zip(scores) {
                match s {
                    Ok(s) => b.push_score(a.date.month_of(), &s),
                    Err(CoreError::ZeroLength) => b.skip(),
                    Err(e) => return Err(e).stage_at(STAGE, corpus),
                }
            }
        }
    }
    if matched == 0 {
        return Err(CliError::Data {
            stage: STAGE,
            message: format!("no article among {read} matches the tag filter {:?}", cfg.tags),
        });
    }

    let mut series = Vec::new();
    for (ix, b) in cfg.indices.iter().zip(builders) {
        series.push(b.finish(ix.name.clone()).stage_at(STAGE, corpus)?);
    }
    let out = StageDir::create(r, STAGE, dirs::INDEX, None)?;
    for ((s, ix), (ph, nh)) in series.iter().zip(&cfg.indices).zip(hashes) {
        let gaps = s.gaps();
        if !gaps.is_empty() {
            log::warn!("index: {}: {} months without articles", ix.name, gaps.len());
        }
        write_series(STAGE, &out.path(&format!("{}.csv", ix.name)), s)?;
        let side = Sidecar {
            meta: &s.meta,
            aggregation: match cfg.weighting {
                Weighting::Unweighted => "mean of article scores per month",
                Weighting::Length => "token-weighted mean of article scores per month",
            },
            positive_sha256: ph,
            negative_sha256: nh,
            tags: &cfg.tags,
            articles_read: read,
            articles_matched: matched,
            months: s.len(),
            missing_months: gaps.iter().map(ToString::to_string).collect(),
        };
        write_json(STAGE, &out.path(&format!("{}.meta.json", ix.name)), &side)?;
    }
    out.finish()
}
