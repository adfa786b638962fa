use std::path::Path;

use sentishift_core::sentiment::Month;

use super::read_to_string;
use crate::error::{CliError, Result};

/// One panel variable: name, observed months and values.
pub type PanelColumn = (String, Vec<Month>, Vec<f64>);

/// Reads a macro panel CSV (`month,<var1>,...`). Each variable comes back as
/// its own observed months and values; blank cells are missing.
pub fn read_panel_columns(stage: &'static str, path: &Path) -> Result<Vec<PanelColumn>> {
    let text = read_to_string(stage, path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let head = rdr
        .headers()
        .map_err(|e| CliError::format(stage, path, Some(1), e.to_string()))?
        .clone();
    if head.get(0) != Some("month") || head.len() < 2 {
        return Err(CliError::format(stage, path, Some(1), "expected header `month,<variable>,...`"));
    }
    let mut cols: Vec<(String, Vec<Month>, Vec<f64>)> =
        head.iter().skip(1).map(|n| (n.to_string(), Vec::new(), Vec::new())).collect();
    let mut last: Option<Month> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            CliError::format(stage, path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize);
        let bad = |m: String| CliError::format(stage, path, line, m);
        let month: Month = rec[0].parse().map_err(|_| bad(format!("invalid month {:?}", &rec[0])))?;
        if last.is_some_and(|l| month <= l) {
            return Err(bad("months must be strictly increasing".into()));
        }
        last = Some(month);
        for (j, cell) in rec.iter().enumerate().skip(1) {
            if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| bad(format!("non-numeric value {cell:?} for {}", &head[j])))?;
            if !v.is_finite() {
                return Err(bad(format!("non-finite value for {}", &head[j])));
            }
            cols[j - 1].1.push(month);
            cols[j - 1].2.push(v);
        }
    }
    Ok(cols)
}
