use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{create, finish, read_to_string};
use crate::error::{CliError, Result};

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(stage: &'static str, path: &Path, value: &T) -> Result<()> {
    let mut w = create(stage, path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::format(stage, path, None, e.to_string()))?;
    writeln!(w).map_err(|e| CliError::io(stage, path, e))?;
    finish(stage, path, w)
}

pub fn read_json<T: DeserializeOwned>(stage: &'static str, path: &Path) -> Result<T> {
    let text = read_to_string(stage, path)?;
    serde_json::from_str(&text).map_err(|e| CliError::format(stage, path, Some(e.line()), e.to_string()))
}
