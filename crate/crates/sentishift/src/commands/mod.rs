//! One module per subcommand. Every command reads a [`Resolved`] config,
//! writes into its own directory under `out` and returns that directory.

mod econ;
mod features;
mod index;
mod lexstat;
mod split;

pub use econ::{econ, EconAction, ModelFile};
pub use features::{features, FeaturesAction};
pub use index::index;
pub use lexstat::lexstat;
pub use split::split;

use std::path::{Path, PathBuf};

use sentishift_core::WordList;

use crate::config::Resolved;
use crate::error::{CliError, Result};
use crate::formats::read_word_list;

/// Output directories, relative to `out`.
pub mod dirs {
    pub const LEXSTAT: &str = "lexstat";
    pub const FEATURES_TRAIN: &str = "features/train";
    pub const FEATURES_PREDICT: &str = "features/predict";
    pub const FEATURES_CROSSVAL: &str = "features/crossval";
    pub const SPLIT: &str = "split";
    pub const INDEX: &str = "index";
    pub const ECON: &str = "econ";
}

/// Loads a configured list and names it after its config key.
pub(crate) fn load_list(r: &Resolved, stage: &'static str, name: &str) -> Result<WordList> {
    let path = r
        .list_path(name)
        .ok_or_else(|| CliError::Config(format!("{stage}: unknown list `{name}`")))?;
    Ok(read_word_list(stage, path)?.renamed(name))
}

/// A configured list, or one written by `split` (`<name>.txt`).
pub(crate) fn load_any_list(r: &Resolved, stage: &'static str, name: &str) -> Result<WordList> {
    if r.list_path(name).is_some() {
        return load_list(r, stage, name);
    }
    let derived = r.out.join(dirs::SPLIT).join(format!("{name}.txt"));
    if derived.is_file() {
        return Ok(read_word_list(stage, &derived)?.renamed(name));
    }
    Err(CliError::Config(format!(
        "{stage}: unknown list `{name}` (not configured and no {} from `split`)",
        derived.display()
    )))
}

pub(crate) fn require_table<'a>(stage: &'static str, p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| CliError::Config(format!("{stage}: `{key}` is not configured")))
}

pub(crate) fn require_upstream(stage: &'static str, path: PathBuf, hint: &str) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::MissingInput {
            stage,
            path,
            hint: hint.to_string(),
        })
    }
}

/// Formats an optional float as a CSV cell.
pub(crate) fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
