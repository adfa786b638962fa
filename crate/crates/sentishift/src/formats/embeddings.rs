use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use sentishift_core::EmbeddingTable;

use crate::error::{CliError, Result, StageContext};

/// Reads whitespace-separated text vectors: `token v1 ... vd` per line, with
/// an optional leading `count dimension` line. Repeated tokens keep the first
/// vector.
pub fn read_embeddings(stage: &'static str, path: &Path) -> Result<EmbeddingTable> {
    let file = File::open(path).map_err(|e| CliError::io(stage, path, e))?;
    let mut table: Option<EmbeddingTable> = None;
    let mut declared: Option<usize> = None;
    let mut duplicates = 0usize;
    let mut values = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(stage, path, e))?;
        let mut parts = line.split_whitespace();
        let Some(word) = parts.next() else { continue };
        values.clear();
        for p in parts {
            let v: f64 = p.parse().map_err(|_| {
                CliError::format(stage, path, Some(i + 1), format!("non-numeric component {p:?} for `{word}`"))
            })?;
            values.push(v);
        }
        if i == 0 && values.len() == 1 {
            if let (Ok(count), Ok(dim)) = (word.parse::<usize>(), line.split_whitespace().nth(1).unwrap().parse::<usize>()) {
                declared = Some(count);
                table = Some(EmbeddingTable::new(dim));
                continue;
            }
        }
        let t = table.get_or_insert_with(|| EmbeddingTable::new(values.len()));
        if t.dimension() == 0 {
            return Err(CliError::format(stage, path, Some(i + 1), "embedding has no components"));
        }
        if !t.insert(word, &values).stage_at(stage, path)? {
            duplicates += 1;
        }
    }
    let table = table.filter(|t| !t.is_empty()).ok_or_else(|| CliError::format(stage, path, None, "no embeddings"))?;
    if duplicates > 0 {
        log::warn!("{stage}: {}: {duplicates} repeated tokens ignored", path.display());
    }
    if let Some(n) = declared {
        if n != table.len() + duplicates {
            log::warn!("{stage}: {}: header declares {n} vectors, found {}", path.display(), table.len() + duplicates);
        }
    }
    Ok(table)
}
