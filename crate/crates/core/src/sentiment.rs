//! Article tokenization, lexicon hit counting and monthly sentiment indices.
//!
//! An article scores `s = (p − n) / t` where `p` and `n` count positive and
//! negative hits (with multiplicity) among its `t` tokens. Monthly values are
//! accumulated in fixed point so the result never depends on the order in
//! which articles arrive or how partial indices are merged.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::WordList;

/// Identifies the tokenization rule; indices are only comparable when built
/// with the same tokenizer.
pub const TOKENIZER_ID: &str = "lowercase-alnum-split/1";

/// Fractional bits of the per-article fixed-point score.
const FIXED_BITS: u32 = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        _ if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        _ => 28,
    }
}

fn parse_fixed(s: &str, digits: usize) -> Option<u32> {
    if s.len() != digits || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_year_month(s: &str) -> Option<(i32, u8)> {
    let (y, m) = s.split_once('-')?;
    let year = parse_fixed(y, 4)? as i32;
    let month = parse_fixed(m, 2)? as u8;
    (1..=12).contains(&month).then_some((year, month))
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return Err(Error::InvalidDate(alloc::format!("{year:04}-{month:02}-{day:02}")));
        }
        Ok(Self { year, month, day })
    }

    pub fn month_of(&self) -> Month {
        Month {
            year: self.year,
            month: self.month,
        }
    }
}

impl FromStr for Date {
    type Err = Error;

    /// Accepts `YYYY-MM-DD`, optionally followed by a time part introduced
    /// by `T` or a space (which is ignored).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDate(s.to_string());
        let s_trim = s.trim();
        let date_part = match s_trim.find(['T', ' ']) {
            Some(i) => &s_trim[..i],
            None => s_trim,
        };
        let (ym, d) = date_part.rsplit_once('-').ok_or_else(bad)?;
        let (year, month) = parse_year_month(ym).ok_or_else(bad)?;
        let day = parse_fixed(d, 2).ok_or_else(bad)? as u8;
        Date::new(year, month, day).map_err(|_| bad())
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// A calendar month, displayed as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    pub year: i32,
    pub month: u8,
}

impl Month {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidDate(alloc::format!("{year:04}-{month:02}")));
        }
        Ok(Self { year, month })
    }

    pub fn next(self) -> Month {
        if self.month == 12 {
            Month {
                year: self.year + 1,
                month: 1,
            }
        } else {
            Month {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    /// Months elapsed since `other` (negative when `other` is later).
    pub fn since(self, other: Month) -> i64 {
        (i64::from(self.year) - i64::from(other.year)) * 12 + i64::from(self.month) - i64::from(other.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (year, month) =
            parse_year_month(s.trim()).ok_or_else(|| Error::InvalidDate(s.to_string()))?;
        Ok(Month { year, month })
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl Serialize for Month {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Month {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub id: String,
    pub date: Date,
    pub tags: Vec<String>,
    pub text: String,
}

impl Article {
    /// Case-insensitive match against any of `wanted`; an empty filter
    /// accepts every article.
    pub fn has_any_tag(&self, wanted: &[String]) -> bool {
        wanted.is_empty()
            || self
                .tags
                .iter()
                .any(|t| wanted.iter().any(|w| w.trim().eq_ignore_ascii_case(t.trim())))
    }
}

/// Lowercases `text` and splits it on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    tokens(text).collect()
}

fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_lowercase())
}

/// Which hits enter the numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreMode {
    /// `p − n`
    #[default]
    Both,
    /// `−n`; the positive list only serves to detect conflicts.
    NegativeOnly,
}

/// How article scores are combined within a month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Mean of article scores.
    #[default]
    Unweighted,
    /// Total hits over total tokens, i.e. scores weighted by article length.
    Length,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Membership {
    Positive,
    Negative,
    Both,
}

/// A positive/negative word-list pair prepared for scoring.
#[derive(Debug, Clone)]
pub struct ScoringLexicon {
    positive: String,
    negative: String,
    mode: ScoreMode,
    words: HashMap<String, Membership>,
}

impl ScoringLexicon {
    pub fn new(positive: &WordList, negative: &WordList, mode: ScoreMode) -> Self {
        let mut words = HashMap::with_capacity(positive.len() + negative.len());
        for w in positive.words() {
            words.insert(w.clone(), Membership::Positive);
        }
        for w in negative.words() {
            words
                .entry(w.clone())
                .and_modify(|m| *m = Membership::Both)
                .or_insert(Membership::Negative);
        }
        Self {
            positive: positive.name().to_string(),
            negative: negative.name().to_string(),
            mode,
            words,
        }
    }

    pub fn positive_name(&self) -> &str {
        &self.positive
    }

    pub fn negative_name(&self) -> &str {
        &self.negative
    }

    pub fn mode(&self) -> ScoreMode {
        self.mode
    }

    /// Words present on both lists.
    pub fn overlap(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self
            .words
            .iter()
            .filter(|(_, m)| **m == Membership::Both)
            .map(|(w, _)| w.as_str())
            .collect();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArticleScore {
    pub p: u64,
    pub n: u64,
    pub t: u64,
    /// Tokens found on both lists (counted toward neither side).
    pub conflicts: u64,
    pub s: f64,
}

impl ArticleScore {
    fn numerator(&self, mode: ScoreMode) -> i128 {
        match mode {
            ScoreMode::Both => i128::from(self.p) - i128::from(self.n),
            ScoreMode::NegativeOnly => -i128::from(self.n),
        }
    }

    fn fixed(&self, mode: ScoreMode) -> i128 {
        let num = self.numerator(mode) << FIXED_BITS;
        let t = i128::from(self.t);
        // Round half away from zero, so swapping lists negates exactly.
        let q = (num.abs() + t / 2) / t;
        if num < 0 {
            -q
        } else {
            q
        }
    }
}

/// Scores a token sequence.
pub fn article_sentiment<S: AsRef<str>>(tokens: &[S], lexicon: &ScoringLexicon) -> Result<ArticleScore> {
    score_iter(tokens.iter().map(|s| s.as_ref()), lexicon)
}

fn score_iter<'a, I: Iterator<Item = &'a str>>(tokens: I, lexicon: &ScoringLexicon) -> Result<ArticleScore> {
    let (mut p, mut n, mut t, mut conflicts) = (0u64, 0u64, 0u64, 0u64);
    for tok in tokens {
        t += 1;
        match lexicon.words.get(tok) {
            Some(Membership::Positive) => p += 1,
            Some(Membership::Negative) => n += 1,
            Some(Membership::Both) => conflicts += 1,
            None => {}
        }
    }
    if t == 0 {
        return Err(Error::ZeroLength);
    }
    let num = match lexicon.mode {
        ScoreMode::Both => p as f64 - n as f64,
        ScoreMode::NegativeOnly => -(n as f64),
    };
    Ok(ArticleScore {
        p,
        n,
        t,
        conflicts,
        s: num / t as f64,
    })
}

/// Tokenizes and scores raw text.
pub fn score_text(text: &str, lexicon: &ScoringLexicon) -> Result<ArticleScore> {
    let owned: Vec<String> = tokens(text).collect();
    score_iter(owned.iter().map(String::as_str), lexicon)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct MonthAcc {
    fixed_sum: i128,
    articles: u64,
    hit_sum: i128,
    tokens: u128,
}

impl MonthAcc {
    fn merge(&mut self, other: &MonthAcc) {
        self.fixed_sum += other.fixed_sum;
        self.articles += other.articles;
        self.hit_sum += other.hit_sum;
        self.tokens += other.tokens;
    }

    fn value(&self, weighting: Weighting) -> f64 {
        match weighting {
            Weighting::Unweighted => {
                let scale = libm::ldexp(1.0, -(FIXED_BITS as i32));
                (self.fixed_sum as f64 * scale) / self.articles as f64
            }
            Weighting::Length => self.hit_sum as f64 / self.tokens as f64,
        }
    }
}

/// Counts gathered while building an index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStats {
    pub scored: u64,
    /// Articles with no tokens.
    pub skipped_empty: u64,
    /// Token occurrences found on both lists.
    pub conflicts: u64,
    pub positive_hits: u64,
    pub negative_hits: u64,
    pub tokens: u64,
}

impl IndexStats {
    fn merge(&mut self, o: &IndexStats) {
        self.scored += o.scored;
        self.skipped_empty += o.skipped_empty;
        self.conflicts += o.conflicts;
        self.positive_hits += o.positive_hits;
        self.negative_hits += o.negative_hits;
        self.tokens += o.tokens;
    }
}

/// Streaming monthly aggregation. Partial builders over disjoint parts of a
/// corpus can be [`merge`](Self::merge)d in any order with identical results.
#[derive(Debug, Clone)]
pub struct MonthlyIndexBuilder<'a> {
    lexicon: &'a ScoringLexicon,
    weighting: Weighting,
    months: BTreeMap<Month, MonthAcc>,
    stats: IndexStats,
}

impl<'a> MonthlyIndexBuilder<'a> {
    pub fn new(lexicon: &'a ScoringLexicon, weighting: Weighting) -> Self {
        Self {
            lexicon,
            weighting,
            months: BTreeMap::new(),
            stats: IndexStats::default(),
        }
    }

    /// Scores one article; returns `None` when it has no tokens.
    pub fn push(&mut self, article: &Article) -> Option<ArticleScore> {
        let score = match score_text(&article.text, self.lexicon) {
            Ok(s) => s,
            Err(_) => {
                self.stats.skipped_empty += 1;
                return None;
            }
        };
        self.push_score(article.date.month_of(), &score);
        Some(score)
    }

    /// Adds an already computed score.
    pub fn push_score(&mut self, month: Month, score: &ArticleScore) {
        let mode = self.lexicon.mode;
        let acc = self.months.entry(month).or_default();
        acc.fixed_sum += score.fixed(mode);
        acc.articles += 1;
        acc.hit_sum += score.numerator(mode);
        acc.tokens += u128::from(score.t);
        self.stats.scored += 1;
        self.stats.conflicts += score.conflicts;
        self.stats.positive_hits += score.p;
        self.stats.negative_hits += score.n;
        self.stats.tokens += score.t;
    }

    /// Records an article that could not be scored.
    pub fn skip(&mut self) {
        self.stats.skipped_empty += 1;
    }

    pub fn merge(&mut self, other: MonthlyIndexBuilder<'_>) {
        for (m, acc) in &other.months {
            self.months.entry(*m).or_default().merge(acc);
        }
        self.stats.merge(&other.stats);
    }

    pub fn stats(&self) -> IndexStats {
        self.stats
    }

    pub fn finish(self, name: impl Into<String>) -> Result<SentimentSeries> {
        if self.months.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut months = Vec::with_capacity(self.months.len());
        let mut values = Vec::with_capacity(self.months.len());
        let mut counts = Vec::with_capacity(self.months.len());
        for (m, acc) in &self.months {
            months.push(*m);
            values.push(acc.value(self.weighting));
            counts.push(acc.articles);
        }
        Ok(SentimentSeries {
            name: name.into(),
            months,
            values,
            counts,
            meta: SeriesMeta {
                tokenizer: TOKENIZER_ID.to_string(),
                weighting: self.weighting,
                mode: self.lexicon.mode,
                positive: self.lexicon.positive.clone(),
                negative: self.lexicon.negative.clone(),
                stats: self.stats,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub tokenizer: String,
    pub weighting: Weighting,
    pub mode: ScoreMode,
    pub positive: String,
    pub negative: String,
    pub stats: IndexStats,
}

/// Monthly index; months with no articles are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSeries {
    pub name: String,
    pub months: Vec<Month>,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    pub meta: SeriesMeta,
}

impl SentimentSeries {
    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    pub fn value_at(&self, month: Month) -> Option<f64> {
        self.months.binary_search(&month).ok().map(|i| self.values[i])
    }

    /// Months missing between the first and last observation.
    pub fn gaps(&self) -> Vec<Month> {
        let mut out = Vec::new();
        for w in self.months.windows(2) {
            let mut m = w[0].next();
            while m < w[1] {
                out.push(m);
                m = m.next();
            }
        }
        out
    }
}

/// Scores a whole corpus into a monthly series.
pub fn build_monthly_index<'a, I>(
    corpus: I,
    lexicon: &ScoringLexicon,
    weighting: Weighting,
    name: &str,
) -> Result<SentimentSeries>
where
    I: IntoIterator<Item = &'a Article>,
{
    let mut b = MonthlyIndexBuilder::new(lexicon, weighting);
    for a in corpus {
        b.push(a);
    }
    b.finish(name)
}
