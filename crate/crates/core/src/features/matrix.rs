use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::lexicon::{check_feature_names, feature_position, RatingTable, Scale};
use crate::linalg::Matrix;

/// Words × named features on a declared rating scale.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    words: Vec<String>,
    features: Vec<String>,
    values: Matrix,
    scale: Scale,
    index: HashMap<String, usize>,
}

impl PartialEq for FeatureMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
            && self.features == other.features
            && self.values == other.values
            && self.scale == other.scale
    }
}

impl FeatureMatrix {
    pub fn new(
        words: Vec<String>,
        features: Vec<String>,
        values: Matrix,
        scale: Scale,
    ) -> Result<Self> {
        check_feature_names(&features)?;
        if values.rows() != words.len() || values.cols() != features.len() {
            return Err(Error::InvalidConfig(alloc::format!(
                "feature matrix is {}x{} but has {} words and {} features",
                values.rows(),
                values.cols(),
                words.len(),
                features.len()
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidConfig(alloc::format!("duplicate word `{w}`")));
            }
            for (j, f) in features.iter().enumerate() {
                let v = values[(i, j)];
                if !v.is_finite() || !scale.contains(v) {
                    return Err(Error::OutOfScale {
                        word: w.clone(),
                        feature: f.clone(),
                        value: v,
                        min: scale.min,
                        max: scale.max,
                    });
                }
            }
        }
        Ok(Self {
            words,
            features,
            values,
            scale,
            index,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        feature_position(&self.features, name)
    }

    pub fn row_index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn row(&self, word: &str) -> Option<&[f64]> {
        self.row_index(word).map(|i| self.values.row(i))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.values.col(self.feature_index(name)?))
    }

    /// Same data as a rating table, so word-lists can be joined against it.
    pub fn to_rating_table(&self) -> Result<RatingTable> {
        let mut t = RatingTable::new(self.features.clone(), self.scale)?;
        for (i, w) in self.words.iter().enumerate() {
            t.insert(w, self.values.row(i).to_vec())?;
        }
        Ok(t)
    }

    /// Rows for the given words (in the given order); unknown words are
    /// skipped.
    pub fn select_words<'a, I>(&self, words: I) -> Result<FeatureMatrix>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut kept = Vec::new();
        let mut idx = Vec::new();
        for w in words {
            if let Some(i) = self.row_index(w) {
                if !kept.iter().any(|k: &String| k == w) {
                    kept.push(w.to_string());
                    idx.push(i);
                }
            }
        }
        FeatureMatrix::new(
            kept,
            self.features.clone(),
            self.values.select_rows(&idx),
            self.scale,
        )
    }
}
