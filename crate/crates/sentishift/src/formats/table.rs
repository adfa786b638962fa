use std::path::Path;

use sentishift_core::{FeatureMatrix, Matrix, RatingTable, Scale};

use super::{create, finish, read_to_string};
use crate::error::{CliError, Result, StageContext};

/// Picks `,` or `\t` from the header line. A header containing both, or
/// neither, is rejected.
pub fn detect_delimiter(header: &str) -> std::result::Result<u8, String> {
    match (header.contains(','), header.contains('\t')) {
        (true, false) => Ok(b','),
        (false, true) => Ok(b'\t'),
        (true, true) => Err("header mixes commas and tabs; delimiter is ambiguous".into()),
        (false, false) => Err("header has a single column; expected `word,<feature>,...`".into()),
    }
}

/// Header plus parsed rows of a `word,<f1>,...` table.
struct WordTable {
    features: Vec<String>,
    rows: Vec<(usize, String, Vec<f64>)>,
}

fn parse_word_table(stage: &'static str, path: &Path) -> Result<WordTable> {
    let text = read_to_string(stage, path)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    let header = text.lines().next().unwrap_or("");
    let delim = detect_delimiter(header).map_err(|m| CliError::format(stage, path, Some(1), m))?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delim)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let head = rdr
        .headers()
        .map_err(|e| CliError::format(stage, path, Some(1), e.to_string()))?
        .clone();
    let features: Vec<String> = head.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            CliError::format(stage, path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let word = rec.get(0).unwrap_or("").to_string();
        let mut values = Vec::with_capacity(features.len());
        for (j, cell) in rec.iter().enumerate().skip(1) {
            let v: f64 = cell.parse().map_err(|_| {
                let feature = features.get(j - 1).map_or("<extra>", String::as_str);
                CliError::format(stage, path, Some(line), format!("non-numeric value {cell:?} for `{word}` / {feature}"))
            })?;
            values.push(v);
        }
        rows.push((line, word, values));
    }
    Ok(WordTable { features, rows })
}

/// Reads a CSV/TSV rating table with header `word,<feature1>,...`.
/// Repeated words keep the last row; the count is logged.
pub fn read_rating_table(stage: &'static str, path: &Path, scale: Scale) -> Result<RatingTable> {
    let t = parse_word_table(stage, path)?;
    let mut table = RatingTable::new(t.features, scale).stage_at(stage, path)?;
    for (_, word, values) in t.rows {
        table.insert(&word, values).stage_at(stage, path)?;
    }
    if table.duplicate_rows() > 0 {
        log::warn!(
            "{stage}: {}: {} duplicate rows (last occurrence kept)",
            path.display(),
            table.duplicate_rows()
        );
    }
    Ok(table)
}

/// Reads a `word,<feature>,...` matrix, keeping row order.
pub fn read_feature_matrix(stage: &'static str, path: &Path, scale: Scale) -> Result<FeatureMatrix> {
    let t = parse_word_table(stage, path)?;
    let nf = t.features.len();
    let mut words = Vec::with_capacity(t.rows.len());
    let mut data = Vec::with_capacity(t.rows.len() * nf);
    for (line, word, values) in t.rows {
        if values.len() != nf {
            return Err(CliError::format(
                stage,
                path,
                Some(line),
                format!("row for `{word}` has {} values, expected {nf}", values.len()),
            ));
        }
        words.push(word.to_lowercase());
        data.extend(values);
    }
    let m = Matrix::from_vec(words.len(), nf, data);
    FeatureMatrix::new(words, t.features, m, scale).stage_at(stage, path)
}

pub fn write_feature_matrix(stage: &'static str, path: &Path, m: &FeatureMatrix) -> Result<()> {
    let mut header = vec!["word".to_string()];
    header.extend(m.features().iter().cloned());
    let rows = m.words().iter().enumerate().map(|(i, w)| {
        let mut r = vec![w.clone()];
        r.extend(m.values().row(i).iter().map(f64::to_string));
        r
    });
    write_csv_rows(stage, path, &header, rows)
}

/// Writes a comma-separated file with a header row.
pub fn write_csv_rows<H, I>(stage: &'static str, path: &Path, header: &[H], rows: I) -> Result<()>
where
    H: AsRef<str>,
    I: IntoIterator<Item = Vec<String>>,
{
    let w = create(stage, path)?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let err = |e: csv::Error| CliError::format(stage, path, None, e.to_string());
    out.write_record(header.iter().map(AsRef::as_ref)).map_err(err)?;
    for r in rows {
        out.write_record(&r).map_err(err)?;
    }
    let w = out.into_inner().map_err(|e| CliError::io(stage, path, e.into_error()))?;
    finish(stage, path, w)
}
