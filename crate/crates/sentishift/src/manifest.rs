//! Per-stage output directories and their `manifest.json` sidecars.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{hex, Resolved};
use crate::error::{CliError, Result};
use crate::formats::write_json;

pub const MANIFEST: &str = "manifest.json";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub version: String,
    pub config_hash: String,
    /// Seed handed to the stage's randomized steps, if it has any.
    pub seed: Option<u64>,
    /// Relative path → SHA-256 of every other file in the directory.
    pub files: BTreeMap<String, String>,
}

/// A freshly emptied stage directory.
pub struct StageDir {
    pub stage: &'static str,
    pub dir: PathBuf,
    seed: Option<u64>,
    config_hash: String,
}

impl StageDir {
    /// Clears and recreates `<out>/<rel>`.
    pub fn create(r: &Resolved, stage: &'static str, rel: &str, seed: Option<u64>) -> Result<Self> {
        let dir = r.out.join(rel);
        if dir.exists() {
            std::fs::remove_dir_all(&dir).map_err(|e| CliError::io(stage, &dir, e))?;
        }
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(stage, &dir, e))?;
        Ok(Self {
            stage,
            dir,
            seed,
            config_hash: r.hash.clone(),
        })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    /// Hashes everything written so far and writes the manifest.
    pub fn finish(self) -> Result<PathBuf> {
        let mut files = BTreeMap::new();
        hash_tree(self.stage, &self.dir, &self.dir, &mut files)?;
        files.remove(MANIFEST);
        let m = Manifest {
            stage: self.stage.to_string(),
            version: VERSION.to_string(),
            config_hash: self.config_hash,
            seed: self.seed,
            files,
        };
        write_json(self.stage, &self.dir.join(MANIFEST), &m)?;
        Ok(self.dir)
    }
}

fn hash_tree(stage: &'static str, root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(stage, dir, e))?;
    for e in entries {
        let p = e.map_err(|e| CliError::io(stage, dir, e))?.path();
        if p.is_dir() {
            hash_tree(stage, root, &p, out)?;
        } else {
            let bytes = std::fs::read(&p).map_err(|e| CliError::io(stage, &p, e))?;
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
            out.insert(rel, hex(&Sha256::digest(&bytes)));
        }
    }
    Ok(())
}

/// SHA-256 of a word-list's canonical form (one lowercase word per line).
pub fn list_hash(words: &[String]) -> String {
    let mut h = Sha256::new();
    for w in words {
        h.update(w.as_bytes());
        h.update(b"\n");
    }
    hex(&h.finalize())
}
