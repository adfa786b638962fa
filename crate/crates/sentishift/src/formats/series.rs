use std::path::Path;

use sentishift_core::sentiment::{Month, SentimentSeries};

use super::{read_to_string, write_csv_rows};
use crate::error::{CliError, Result};

/// A monthly series as read back from `month,value,article_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesColumns {
    pub months: Vec<Month>,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
}

pub fn write_series(stage: &'static str, path: &Path, s: &SentimentSeries) -> Result<()> {
    let rows = s
        .months
        .iter()
        .zip(&s.values)
        .zip(&s.counts)
        .map(|((m, v), c)| vec![m.to_string(), v.to_string(), c.to_string()]);
    write_csv_rows(stage, path, &["month", "value", "article_count"], rows)
}

pub fn read_series(stage: &'static str, path: &Path) -> Result<SeriesColumns> {
    let text = read_to_string(stage, path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "month,value,article_count" => {}
        _ => return Err(CliError::format(stage, path, Some(1), "expected header `month,value,article_count`")),
    }
    let mut out = SeriesColumns {
        months: Vec::new(),
        values: Vec::new(),
        counts: Vec::new(),
    };
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: &str| CliError::format(stage, path, Some(i + 1), m.to_string());
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(bad("expected 3 fields"));
        }
        let month: Month = f[0].parse().map_err(|_| bad("invalid month"))?;
        if out.months.last().is_some_and(|&last| month <= last) {
            return Err(bad("months must be strictly increasing"));
        }
        out.months.push(month);
        out.values.push(f[1].parse().map_err(|_| bad("invalid value"))?);
        out.counts.push(f[2].parse().map_err(|_| bad("invalid article count"))?);
    }
    Ok(out)
}
