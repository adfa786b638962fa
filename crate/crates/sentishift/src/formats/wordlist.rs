use std::io::Write;
use std::path::Path;

use sentishift_core::WordList;

use super::{create, finish, read_to_string};
use crate::error::{CliError, Result, StageContext};

/// One token per line; blank lines and lines starting with `#` are skipped.
/// The list is named after the file stem.
pub fn read_word_list(stage: &'static str, path: &Path) -> Result<WordList> {
    let text = read_to_string(stage, path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "list".to_string());
    let mut words = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if t.contains(char::is_whitespace) {
            return Err(CliError::format(stage, path, Some(i + 1), format!("token {t:?} contains whitespace")));
        }
        words.push(t);
    }
    WordList::new(name, words).stage_at(stage, path)
}

pub fn write_word_list(stage: &'static str, path: &Path, list: &WordList) -> Result<()> {
    let mut w = create(stage, path)?;
    for word in list.words() {
        writeln!(w, "{word}").map_err(|e| CliError::io(stage, path, e))?;
    }
    finish(stage, path, w)
}
