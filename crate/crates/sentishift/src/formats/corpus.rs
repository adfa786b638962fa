use std::fs::File;
use std::io::{BufRead, BufReader, Lines};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sentishift_core::sentiment::{Article, Date};

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Id {
    Text(String),
    Number(serde_json::Number),
}

/// One JSON-lines record as it appears on disk.
#[derive(Debug, Deserialize)]
pub struct RawArticle {
    id: Id,
    date: String,
    #[serde(default)]
    tags: Vec<String>,
    text: String,
}

impl RawArticle {
    fn into_article(self) -> std::result::Result<Article, String> {
        let date: Date = self.date.parse().map_err(|e: sentishift_core::Error| e.to_string())?;
        Ok(Article {
            id: match self.id {
                Id::Text(s) => s,
                Id::Number(n) => n.to_string(),
            },
            date,
            tags: self.tags,
            text: self.text,
        })
    }
}

/// Streams articles from a JSON-lines file; blank lines are skipped.
pub struct CorpusReader {
    stage: &'static str,
    path: PathBuf,
    lines: Lines<BufReader<File>>,
    line: usize,
}

impl CorpusReader {
    pub fn open(stage: &'static str, path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| CliError::io(stage, path, e))?;
        Ok(Self {
            stage,
            path: path.to_path_buf(),
            lines: BufReader::new(f).lines(),
            line: 0,
        })
    }

    /// Reads up to `n` articles.
    pub fn next_chunk(&mut self, n: usize) -> Result<Vec<Article>> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            match self.next() {
                Some(a) => out.push(a?),
                None => break,
            }
        }
        Ok(out)
    }
}

impl Iterator for CorpusReader {
    type Item = Result<Article>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line += 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => return Some(Err(CliError::io(self.stage, &self.path, e))),
            };
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<RawArticle>(&line)
                .map_err(|e| e.to_string())
                .and_then(RawArticle::into_article);
            return Some(parsed.map_err(|m| CliError::format(self.stage, &self.path, Some(self.line), m)));
        }
    }
}
