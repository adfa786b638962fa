//! Numerical core for comparing affect word-lists and measuring the economic
//! effect of news sentiment.
//!
//! The crate is `no_std` and only needs an allocator. It covers:
//!
//! * [`lexicon`]: word-lists, rating tables and their joins,
//! * [`resampling`]: permutation tests and valence-matched resampling,
//! * [`features`]: embedding tables and per-feature regression networks,
//! * [`structure`]: feature correlations, PCA, k-means and list splitting,
//! * [`sentiment`]: tokenization, article scoring and monthly indices,
//! * [`econ`]: unit-root and cointegration tests, mixed VECM estimation,
//!   impulse responses, variance decompositions and bootstrap bands.
//!
//! File formats, configuration and the command line live in the companion
//! `sentishift` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod econ;
pub mod error;
pub mod features;
pub mod lexicon;
pub mod linalg;
pub mod resampling;
pub mod rng;
pub mod sentiment;
pub mod stats;
pub mod structure;

pub use error::{Error, ErrorKind, Result};
pub use features::{EmbeddingTable, FeatureMatrix};
pub use lexicon::{RatedWordSet, RatingTable, Scale, WordList};
pub use linalg::Matrix;
