//! Run configuration: a TOML file plus command-line overrides.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Inputs produced by an earlier stage default to that stage's output
//! location under `out`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sentishift_core::econ::Deterministic;
use sentishift_core::features::NetworkConfig;
use sentishift_core::resampling::{DEFAULT_BUCKETS, DEFAULT_REPEATS, DEFAULT_RESAMPLES};
use sentishift_core::rng::derive_seed;
use sentishift_core::sentiment::{ScoreMode, Weighting};
use sentishift_core::structure::DEFAULT_RESTARTS;

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Output root; excluded from the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Word-lists by name. The key, not the file stem, names the list.
    #[serde(default)]
    pub lists: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub tables: Tables,
    #[serde(default)]
    pub lexstat: LexstatConfig,
    #[serde(default)]
    pub features: FeaturesConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub index: IndexConfig,
    #[serde(default)]
    pub econ: EconConfig,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tables {
    /// Valence/arousal/dominance ratings on [0, 1].
    pub vad: Option<PathBuf>,
    /// Human feature ratings on [0, 7].
    pub binder: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonGroup {
    pub name: String,
    /// Every other list is tested against this one.
    pub reference: String,
    pub compare: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchedConfig {
    pub target: String,
    pub source: String,
    /// Feature matrices covering both lists; defaults to the `features
    /// predict` outputs for `target` and `source`.
    pub features: Vec<PathBuf>,
    pub repeats: usize,
    pub buckets: usize,
}

impl Default for MatchedConfig {
    fn default() -> Self {
        Self {
            target: String::new(),
            source: String::new(),
            features: Vec::new(),
            repeats: DEFAULT_REPEATS,
            buckets: DEFAULT_BUCKETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LexstatConfig {
    pub resamples: usize,
    pub valence_feature: String,
    pub groups: Vec<ComparisonGroup>,
    pub matched: Option<MatchedConfig>,
}

impl Default for LexstatConfig {
    fn default() -> Self {
        Self {
            resamples: DEFAULT_RESAMPLES,
            valence_feature: "Valence".into(),
            groups: Vec::new(),
            matched: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeaturesConfig {
    pub k_folds: usize,
    /// Lists to predict; empty means every configured list.
    pub predict: Vec<String>,
    pub network: NetworkOverrides,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        Self {
            k_folds: 5,
            predict: Vec::new(),
            network: NetworkOverrides::default(),
        }
    }
}

/// Partial network settings layered over the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden_units: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_training_words: Option<usize>,
}

impl NetworkOverrides {
    pub fn resolve(&self) -> NetworkConfig {
        let d = NetworkConfig::default();
        NetworkConfig {
            hidden_units: self.hidden_units.unwrap_or(d.hidden_units),
            max_epochs: self.max_epochs.unwrap_or(d.max_epochs),
            patience: self.patience.unwrap_or(d.patience),
            validation_fraction: self.validation_fraction.unwrap_or(d.validation_fraction),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            min_training_words: self.min_training_words.unwrap_or(d.min_training_words),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub list: String,
    /// Predicted features for `list`; defaults to the `features predict`
    /// output.
    pub features: Option<PathBuf>,
    pub pca_features: Vec<String>,
    pub n_components: usize,
    pub restarts: usize,
    /// Features whose summed mean marks the first sub-list.
    pub label_features: Vec<String>,
    pub allow_tie: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            list: String::new(),
            features: None,
            pca_features: ["Fearful", "Surprised", "Cognition", "Drive"].map(String::from).to_vec(),
            n_components: 2,
            restarts: DEFAULT_RESTARTS,
            label_features: ["Cognition", "Drive"].map(String::from).to_vec(),
            allow_tie: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSpec {
    pub name: String,
    pub positive: String,
    pub negative: String,
    #[serde(default = "default_mode")]
    pub mode: ScoreMode,
}

fn default_mode() -> ScoreMode {
    ScoreMode::Both
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexConfig {
    pub corpus: Option<PathBuf>,
    /// Keep only articles carrying at least one of these tags; empty keeps all.
    pub tags: Vec<String>,
    pub weighting: Weighting,
    pub indices: Vec<IndexSpec>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            tags: Vec::new(),
            weighting: Weighting::Unweighted,
            indices: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EconConfig {
    pub panel: Option<PathBuf>,
    /// Name of a sentiment index to add to the panel.
    pub sentiment: Option<String>,
    /// Series file for `sentiment`; defaults to the `index` output.
    pub sentiment_file: Option<PathBuf>,
    /// Variable order (also the Cholesky ordering); defaults to panel order
    /// followed by the sentiment index.
    pub order: Vec<String>,
    pub log: Vec<String>,
    pub stationary: Vec<String>,
    pub adf_max_lag: usize,
    pub adf_deterministic: Deterministic,
    pub max_lag: usize,
    /// Levels lag; chosen by the Schwarz criterion when absent.
    pub lag: Option<usize>,
    /// Cointegration rank; taken from the trace test when absent.
    pub rank: Option<usize>,
    pub horizon: usize,
    pub replications: usize,
    pub level: f64,
}

impl Default for EconConfig {
    fn default() -> Self {
        Self {
            panel: None,
            sentiment: None,
            sentiment_file: None,
            order: Vec::new(),
            log: Vec::new(),
            stationary: Vec::new(),
            adf_max_lag: sentishift_core::econ::DEFAULT_MAX_LAG,
            adf_deterministic: Deterministic::Constant,
            max_lag: 8,
            lag: None,
            rank: None,
            horizon: 24,
            replications: 1000,
            level: 0.95,
        }
    }
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tags: Option<Vec<String>>,
    pub resamples: Option<usize>,
    pub repeats: Option<usize>,
    pub buckets: Option<usize>,
    pub k_folds: Option<usize>,
    pub max_epochs: Option<usize>,
    pub hidden_units: Option<usize>,
    pub split_list: Option<String>,
    pub restarts: Option<usize>,
    pub allow_tie: bool,
    pub weighting: Option<Weighting>,
    pub lag: Option<usize>,
    pub rank: Option<usize>,
    pub max_lag: Option<usize>,
    pub horizon: Option<usize>,
    pub replications: Option<usize>,
    pub level: Option<f64>,
}

/// A loaded configuration with every path made absolute.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub out: PathBuf,
    /// SHA-256 of the configuration as written (after overrides), without
    /// `out`.
    pub hash: String,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($field:expr, $v:expr) => {
                if let Some(v) = $v.clone() {
                    $field = v;
                }
            };
        }
        set!(self.seed, o.seed);
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        set!(self.index.tags, o.tags);
        set!(self.lexstat.resamples, o.resamples);
        if let Some(m) = self.lexstat.matched.as_mut() {
            set!(m.repeats, o.repeats);
            set!(m.buckets, o.buckets);
        }
        set!(self.features.k_folds, o.k_folds);
        if o.max_epochs.is_some() {
            self.features.network.max_epochs = o.max_epochs;
        }
        if o.hidden_units.is_some() {
            self.features.network.hidden_units = o.hidden_units;
        }
        set!(self.split.list, o.split_list);
        set!(self.split.restarts, o.restarts);
        self.split.allow_tie |= o.allow_tie;
        set!(self.index.weighting, o.weighting);
        if o.lag.is_some() {
            self.econ.lag = o.lag;
        }
        if o.rank.is_some() {
            self.econ.rank = o.rank;
        }
        set!(self.econ.max_lag, o.max_lag);
        set!(self.econ.horizon, o.horizon);
        set!(self.econ.replications, o.replications);
        set!(self.econ.level, o.level);
    }

    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }

    /// Checks counts and levels; paths are checked by [`RunConfig::resolve`].
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lexstat.resamples", self.lexstat.resamples),
            ("features.k_folds", self.features.k_folds),
            ("split.n_components", self.split.n_components),
            ("split.restarts", self.split.restarts),
            ("econ.max_lag", self.econ.max_lag),
            ("econ.adf_max_lag", self.econ.adf_max_lag),
            ("econ.horizon", self.econ.horizon),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if let Some(m) = &self.lexstat.matched {
            if m.repeats == 0 || m.buckets == 0 {
                return Err(CliError::Config("lexstat.matched repeats and buckets must be positive".into()));
            }
        }
        if self.features.k_folds < 2 {
            return Err(CliError::Config("features.k_folds must be at least 2".into()));
        }
        if !(self.econ.level > 0.0 && self.econ.level < 1.0) {
            return Err(CliError::Config(format!("econ.level {} must lie in (0, 1)", self.econ.level)));
        }
        if self.econ.lag == Some(0) {
            return Err(CliError::Config("econ.lag must be positive".into()));
        }
        self.features
            .network
            .resolve()
            .validate()
            .map_err(|e| CliError::Config(format!("features.network: {e}")))?;
        for g in &self.lexstat.groups {
            for l in std::iter::once(&g.reference).chain(&g.compare) {
                self.require_list(l, &format!("lexstat group `{}`", g.name))?;
            }
        }
        if let Some(m) = &self.lexstat.matched {
            self.require_list(&m.target, "lexstat.matched.target")?;
            self.require_list(&m.source, "lexstat.matched.source")?;
        }
        for l in &self.features.predict {
            self.require_list(l, "features.predict")?;
        }
        let mut names = std::collections::BTreeSet::new();
        for ix in &self.index.indices {
            if !names.insert(&ix.name) {
                return Err(CliError::Config(format!("duplicate index name `{}`", ix.name)));
            }
            if ix.name.is_empty() || ix.name.contains(['/', '\\']) {
                return Err(CliError::Config(format!("invalid index name {:?}", ix.name)));
            }
        }
        Ok(())
    }

    fn require_list(&self, name: &str, context: &str) -> Result<()> {
        if self.lists.contains_key(name) {
            Ok(())
        } else {
            Err(CliError::Config(format!("{context}: unknown list `{name}`")))
        }
    }

    /// Makes paths absolute relative to `base` and checks that every
    /// configured input exists.
    pub fn resolve(mut self, base: &Path) -> Result<Resolved> {
        self.validate()?;
        let hash = self.hash();
        let abs = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let mut inputs: Vec<(String, &mut PathBuf)> = Vec::new();
        for (name, p) in self.lists.iter_mut() {
            inputs.push((format!("lists.{name}"), p));
        }
        let t = &mut self.tables;
        for (name, p) in [("tables.vad", &mut t.vad), ("tables.binder", &mut t.binder), ("tables.embeddings", &mut t.embeddings)] {
            if let Some(p) = p.as_mut() {
                inputs.push((name.into(), p));
            }
        }
        if let Some(p) = self.index.corpus.as_mut() {
            inputs.push(("index.corpus".into(), p));
        }
        if let Some(p) = self.econ.panel.as_mut() {
            inputs.push(("econ.panel".into(), p));
        }
        for (name, p) in inputs {
            abs(p);
            if !p.is_file() {
                return Err(CliError::Config(format!("{name}: no such file {}", p.display())));
            }
        }
        // Upstream outputs may not exist yet; stages check them when used.
        if let Some(m) = self.lexstat.matched.as_mut() {
            m.features.iter_mut().for_each(abs);
        }
        if let Some(p) = self.split.features.as_mut() {
            abs(p);
        }
        if let Some(p) = self.econ.sentiment_file.as_mut() {
            abs(p);
        }
        let mut out = self.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        abs(&mut out);
        Ok(Resolved {
            config: self,
            out,
            hash,
        })
    }
}

impl Resolved {
    /// Loads `path`, applies overrides and resolves paths. Relative `--out`
    /// values are taken relative to the working directory, not the config.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            e => e,
        })?;
        let mut o = overrides.clone();
        if let Some(out) = o.out.as_mut() {
            if out.is_relative() {
                *out = std::env::current_dir()
                    .map_err(|e| CliError::Config(e.to_string()))?
                    .join(&*out);
            }
        }
        cfg.apply(&o);
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let base = base
            .canonicalize()
            .map_err(|e| CliError::Config(format!("{}: {e}", base.display())))?;
        cfg.resolve(&base)
    }

    /// Seed for a stage, independent of every other stage's label.
    pub fn stage_seed(&self, label: &str) -> u64 {
        derive_seed(self.config.seed, label)
    }

    pub fn list_path(&self, name: &str) -> Option<&Path> {
        self.config.lists.get(name).map(PathBuf::as_path)
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
