use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Inputs violate a precondition or contain invalid values.
    Data,
    /// A numerical procedure broke down on otherwise valid inputs.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    // lexicon
    #[error("word-list `{name}` is empty")]
    EmptyList { name: String },
    #[error("invalid token {token:?}: tokens must be non-empty and contain no whitespace")]
    InvalidToken { token: String },
    #[error("rating {value} for `{word}` / {feature} lies outside the scale [{min}, {max}]")]
    OutOfScale {
        word: String,
        feature: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("row for `{word}` has {found} ratings, expected {expected}")]
    RaggedRow {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid rating scale [{min}, {max}]")]
    InvalidScale { min: f64, max: f64 },
    #[error("word-list `{list}` shares no words with the table")]
    NoOverlap { list: String },
    #[error("rated word set is empty")]
    EmptySet,
    #[error("unknown feature `{name}`")]
    UnknownFeature { name: String },
    #[error("duplicate feature name `{name}`")]
    DuplicateFeature { name: String },

    // resampling
    #[error("sample of size {len} is too small (need at least {required})")]
    SampleTooSmall { len: usize, required: usize },
    #[error("number of resamples must be positive")]
    ZeroResamples,
    #[error("valence matching kept only {matched} words (need at least 2)")]
    InsufficientMatch { matched: usize },
    #[error("number of buckets must be positive")]
    ZeroBuckets,

    // feature extrapolation
    #[error("embedding for `{word}` has {found} components, expected {expected}")]
    DimensionMismatch {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value for `{word}`")]
    NonFinite { word: String },
    #[error("only {found} rated words have embeddings (need at least {required})")]
    InsufficientOverlap { found: usize, required: usize },
    #[error("training loss for feature `{feature}` became non-finite at epoch {epoch}")]
    NonFiniteLoss { feature: String, epoch: usize },
    #[error("fold {fold} has {size} held-out words (need at least 2)")]
    FoldTooSmall { fold: usize, size: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    // structure analysis
    #[error("need at least {required} words, got {found}")]
    TooFewWords { found: usize, required: usize },
    #[error("feature `{feature}` has zero variance")]
    ZeroVariance { feature: String },
    #[error("data have rank {rank}, fewer than the {required} requested components")]
    RankDeficient { rank: usize, required: usize },
    #[error("need at least {required} distinct points, found {found}")]
    TooFewDistinctPoints { found: usize, required: usize },
    #[error("clusters tie on the labeling statistic ({value}); an explicit override is required")]
    LabelTie { value: f64 },

    // sentiment
    #[error("token sequence is empty")]
    ZeroLength,
    #[error("invalid date {0:?}")]
    InvalidDate(String),
    #[error("corpus contains no scorable article")]
    EmptyCorpus,

    // econometrics
    #[error("series of length {len} is too short (need more than {required})")]
    SeriesTooShort { len: usize, required: usize },
    #[error("series is constant")]
    ConstantSeries,
    #[error("{available} observations are not enough (need more than {required})")]
    InsufficientObservations { available: usize, required: usize },
    #[error("moment matrix is singular")]
    SingularMoments,
    #[error("cointegration rank {rank} exceeds the {variables} non-stationary variables")]
    RankTooLarge { rank: usize, variables: usize },
    #[error("regressors are collinear")]
    Collinear,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("responses overflowed at horizon {horizon} (growth factor {growth:.3} per step)")]
    ExplosiveDynamics { horizon: usize, growth: f64 },
    #[error("{dropped} of {replications} bootstrap replications failed (limit 5%)")]
    BootstrapFailure { dropped: usize, replications: usize },
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NonFiniteLoss { .. }
            | RankDeficient { .. }
            | SingularMoments
            | Collinear
            | NotPositiveDefinite
            | Singular
            | ExplosiveDynamics { .. }
            | BootstrapFailure { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}
