//! Readers and writers for every on-disk format the pipeline uses.
//!
//! Writers are deterministic: floats use Rust's shortest round-trip
//! representation and nothing time- or host-dependent is emitted.

mod corpus;
mod embeddings;
mod json;
mod panel;
mod series;
mod table;
mod wordlist;

pub use corpus::{CorpusReader, RawArticle};
pub use embeddings::read_embeddings;
pub use json::{read_json, write_json};
pub use panel::read_panel_columns;
pub use series::{read_series, write_series, SeriesColumns};
pub use table::{
    detect_delimiter, read_feature_matrix, read_rating_table, write_csv_rows, write_feature_matrix,
};
pub use wordlist::{read_word_list, write_word_list};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

/// Creates `path` (and its parent directories) for buffered writing.
pub(crate) fn create(stage: &'static str, path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(stage, dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(stage, path, e))
}

pub(crate) fn finish(stage: &'static str, path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| CliError::io(stage, path, e))
}

pub(crate) fn read_to_string(stage: &'static str, path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(stage, path, e))
}
