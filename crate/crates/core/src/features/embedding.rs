use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};

/// Word vectors of one fixed dimension.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dimension: usize,
    words: Vec<String>,
    values: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            ..Self::default()
        }
    }

    /// Adds a vector. Returns `false` (and keeps the earlier vector) when the
    /// word is already present.
    pub fn insert(&mut self, word: &str, vector: &[f64]) -> Result<bool> {
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                word: word.to_string(),
                expected: self.dimension,
                found: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                word: word.to_string(),
            });
        }
        let key = word.to_lowercase();
        if self.index.contains_key(&key) {
            return Ok(false);
        }
        self.index.insert(key.clone(), self.words.len());
        self.words.push(key);
        self.values.extend_from_slice(vector);
        Ok(true)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.values[i * self.dimension..(i + 1) * self.dimension])
    }

    /// Words in insertion order.
    pub fn words(&self) -> &[String] {
        &self.words
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_occurrence_wins() {
        let mut t = EmbeddingTable::new(2);
        assert!(t.insert("a", &[1.0, 0.0]).unwrap());
        assert!(!t.insert("a", &[5.0, 5.0]).unwrap());
        assert_eq!(t.get("a"), Some(&[1.0, 0.0][..]));
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        let mut t = EmbeddingTable::new(3);
        assert!(matches!(
            t.insert("b", &[1.0, 2.0]),
            Err(Error::DimensionMismatch { found: 2, .. })
        ));
        assert!(matches!(
            t.insert("c", &[1.0, f64::NAN, 0.0]),
            Err(Error::NonFinite { .. })
        ));
    }
}
