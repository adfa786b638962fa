//! Word-lists, per-word rating tables and the join between them.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered set of lowercase tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordList {
    name: String,
    words: Vec<String>,
}

impl WordList {
    /// Lowercases and deduplicates `words`, keeping first occurrences.
    pub fn new<I, S>(name: impl Into<String>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for w in words {
            let w = w.as_ref();
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::InvalidToken {
                    token: w.to_string(),
                });
            }
            let lower = w.to_lowercase();
            if seen.insert(lower.clone()) {
                out.push(lower);
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyList { name });
        }
        Ok(Self { name, words: out })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.iter().any(|w| w == word)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Closed rating interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub min: f64,
    pub max: f64,
}

impl Scale {
    /// Valence/arousal/dominance ratings.
    pub const VAD: Scale = Scale { min: 0.0, max: 1.0 };
    /// Semantic feature ratings.
    pub const BINDER: Scale = Scale { min: 0.0, max: 7.0 };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidScale { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Per-word rating vectors over named features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingTable {
    features: Vec<String>,
    scale: Scale,
    entries: BTreeMap<String, Vec<f64>>,
    duplicate_rows: usize,
}

impl RatingTable {
    pub fn new(features: Vec<String>, scale: Scale) -> Result<Self> {
        check_feature_names(&features)?;
        Ok(Self {
            features,
            scale,
            entries: BTreeMap::new(),
            duplicate_rows: 0,
        })
    }

    /// Adds a row. A repeated word replaces the earlier row and bumps
    /// [`duplicate_rows`](Self::duplicate_rows).
    pub fn insert(&mut self, word: &str, ratings: Vec<f64>) -> Result<()> {
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken {
                token: word.to_string(),
            });
        }
        if ratings.len() != self.features.len() {
            return Err(Error::RaggedRow {
                word: word.to_string(),
                expected: self.features.len(),
                found: ratings.len(),
            });
        }
        for (v, f) in ratings.iter().zip(&self.features) {
            if !v.is_finite() || !self.scale.contains(*v) {
                return Err(Error::OutOfScale {
                    word: word.to_string(),
                    feature: f.clone(),
                    value: *v,
                    min: self.scale.min,
                    max: self.scale.max,
                });
            }
        }
        if self.entries.insert(word.to_lowercase(), ratings).is_some() {
            self.duplicate_rows += 1;
        }
        Ok(())
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        feature_position(&self.features, name)
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rows replaced by a later duplicate while loading.
    pub fn duplicate_rows(&self) -> usize {
        self.duplicate_rows
    }

    /// Entries in lexicographic word order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(w, r)| (w.as_str(), r.as_slice()))
    }
}

pub(crate) fn check_feature_names(features: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for f in features {
        if !seen.insert(f.as_str()) {
            return Err(Error::DuplicateFeature { name: f.clone() });
        }
    }
    Ok(())
}

pub(crate) fn feature_position(features: &[String], name: &str) -> Result<usize> {
    features
        .iter()
        .position(|f| f == name)
        .ok_or_else(|| Error::UnknownFeature {
            name: name.to_string(),
        })
}

/// A word-list joined to a rating table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatedWordSet {
    list_name: String,
    features: Vec<String>,
    scale: Scale,
    rows: Vec<(String, Vec<f64>)>,
    dropped: Vec<String>,
}

impl RatedWordSet {
    pub fn list_name(&self) -> &str {
        &self.list_name
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        feature_position(&self.features, name)
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    /// Matched rows in word-list order.
    pub fn rows(&self) -> &[(String, Vec<f64>)] {
        &self.rows
    }

    /// List words missing from the table, in word-list order.
    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coverage(&self) -> f64 {
        let total = self.rows.len() + self.dropped.len();
        if total == 0 {
            0.0
        } else {
            self.rows.len() as f64 / total as f64
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(w, _)| w.as_str())
    }

    /// Column of ratings for one feature, in row order.
    pub fn feature_values(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.feature_index(name)?;
        Ok(self.rows.iter().map(|(_, r)| r[j]).collect())
    }
}

/// Restricts `table` to the words of `list`.
pub fn join(list: &WordList, table: &RatingTable) -> Result<RatedWordSet> {
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for w in list.words() {
        match table.get(w) {
            Some(r) => rows.push((w.clone(), r.to_vec())),
            None => dropped.push(w.clone()),
        }
    }
    if rows.is_empty() {
        return Err(Error::NoOverlap {
            list: list.name().to_string(),
        });
    }
    Ok(RatedWordSet {
        list_name: list.name().to_string(),
        features: table.features().to_vec(),
        scale: table.scale(),
        rows,
        dropped,
    })
}

/// Arithmetic mean of every feature over the set's rows.
pub fn feature_means(set: &RatedWordSet) -> Result<Vec<f64>> {
    if set.rows.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut sums = alloc::vec![0.0; set.features.len()];
    for (_, r) in &set.rows {
        for (s, v) in sums.iter_mut().zip(r) {
            *s += v;
        }
    }
    let n = set.rows.len() as f64;
    Ok(sums
        .into_iter()
        .map(|s| set.scale.clamp(s / n))
        .collect())
}
