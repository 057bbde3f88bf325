//! Tweet corpora, thematic-field queries, and the daily time-series
//! arithmetic built on them.
//!
//! A [`ThematicField`] is an AND-of-OR keyword query: the outer groups must
//! all be satisfied, each by at least one of its keywords occurring as a
//! whole token of the tweet text. Matching is case-insensitive because both
//! keywords and tweet tokens are lowercased.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::mathx;
use crate::mining;
use crate::time::{Timestamp, UtcDate};

/// One microblog message: the universal input record.
#[derive(Clone, Debug, PartialEq)]
pub struct Tweet {
    pub id: String,
    pub created_at: Timestamp,
    pub text: String,
    pub author: String,
    pub retweeters: Vec<String>,
    pub hashtags: Vec<String>,
    pub retweet_count: u64,
    pub label: Option<String>,
}

/// An ordered collection of tweets with unique ids.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    tweets: Vec<Tweet>,
}

/// AND-of-OR keyword query. Outer vec = AND, inner vec = OR alternatives.
#[derive(Clone, Debug, PartialEq)]
pub struct ThematicField {
    pub name: String,
    pub groups: Vec<Vec<String>>,
}

/// Daily-binned real-valued series starting at `start_day`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTimeSeries {
    pub start_day: UtcDate,
    pub values: Vec<f64>,
}

/// Date-sorted closing prices.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries {
    pub entries: Vec<(UtcDate, f64)>,
}

/// Paired regressor/response columns produced by [`align_for_regression`].
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionData {
    pub dates: Vec<UtcDate>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusError {
    EmptyTweetId,
    DuplicateTweetId(String),
    BlankUsername(String),
    EmptyField(String),
    BadFieldSyntax { line: usize, message: String },
    EmptyTrend(String),
    ZeroWindow,
    TooShort(usize),
    ZeroVariance,
    NonMonotonePrices(String),
    NonPositivePrice(String),
    InsufficientOverlap(usize),
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::EmptyTweetId => write!(f, "tweet id is empty"),
            CorpusError::DuplicateTweetId(id) => write!(f, "duplicate tweet id: {id}"),
            CorpusError::BlankUsername(id) => {
                write!(f, "tweet {id}: username blank after trimming")
            }
            CorpusError::EmptyField(name) => {
                write!(f, "thematic field '{name}' has no keyword groups")
            }
            CorpusError::BadFieldSyntax { line, message } => {
                write!(f, "bad field syntax at line {line}: {message}")
            }
            CorpusError::EmptyTrend(name) => {
                write!(f, "empty trend: no tweet matches thematic field '{name}'")
            }
            CorpusError::ZeroWindow => write!(f, "rolling window must be at least 1"),
            CorpusError::TooShort(n) => {
                write!(f, "series of length {n} is too short to z-score")
            }
            CorpusError::ZeroVariance => write!(f, "zero variance: series is constant"),
            CorpusError::NonMonotonePrices(d) => {
                write!(f, "price dates not strictly increasing at {d}")
            }
            CorpusError::NonPositivePrice(d) => write!(f, "non-positive price at {d}"),
            CorpusError::InsufficientOverlap(n) => {
                write!(f, "only {n} overlapping dates; at least 3 required")
            }
        }
    }
}

impl core::error::Error for CorpusError {}

impl Corpus {
    /// Builds a corpus, enforcing id uniqueness and username validity.
    pub fn from_tweets(tweets: Vec<Tweet>) -> Result<Self, CorpusError> {
        let mut seen: alloc::collections::BTreeSet<&str> = alloc::collections::BTreeSet::new();
        for tweet in &tweets {
            if tweet.id.is_empty() {
                return Err(CorpusError::EmptyTweetId);
            }
            if !seen.insert(tweet.id.as_str()) {
                return Err(CorpusError::DuplicateTweetId(tweet.id.clone()));
            }
            if tweet.author.trim().is_empty() {
                return Err(CorpusError::BlankUsername(tweet.id.clone()));
            }
            if tweet.retweeters.iter().any(|r| r.trim().is_empty()) {
                return Err(CorpusError::BlankUsername(tweet.id.clone()));
            }
        }
        Ok(Corpus { tweets })
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }
}

impl ThematicField {
    pub fn new(name: &str, groups: Vec<Vec<String>>) -> Result<Self, CorpusError> {
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(CorpusError::EmptyField(name.to_string()));
        }
        let groups = groups
            .into_iter()
            .map(|g| g.into_iter().map(|kw| kw.to_lowercase()).collect())
            .collect();
        Ok(ThematicField {
            name: name.to_string(),
            groups,
        })
    }

    /// Parses one config line: `name: (kw OR kw ...) (kw OR kw ...)`.
    ///
    /// A bare keyword outside parentheses forms a singleton group. `line_no`
    /// is used for error reporting only.
    pub fn parse_line(line: &str, line_no: usize) -> Result<Self, CorpusError> {
        let syntax = |message: &str| CorpusError::BadFieldSyntax {
            line: line_no,
            message: message.to_string(),
        };
        let (name, rest) = line.split_once(':').ok_or_else(|| syntax("missing ':'"))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(syntax("empty field name"));
        }

        let mut groups: Vec<Vec<String>> = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            if let Some(stripped) = rest.strip_prefix('(') {
                let close = stripped.find(')').ok_or_else(|| syntax("unclosed '('"))?;
                let inner = &stripped[..close];
                // commas act as OR separators too; search-style queries mix both
                let keywords: Vec<String> = inner
                    .split(" OR ")
                    .flat_map(|part| part.split(','))
                    .map(|kw| kw.trim().to_lowercase())
                    .filter(|kw| !kw.is_empty())
                    .collect();
                if keywords.is_empty() {
                    return Err(syntax("empty group"));
                }
                groups.push(keywords);
                rest = stripped[close + 1..].trim_start();
            } else {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                let word = &rest[..end];
                if word == "OR" {
                    return Err(syntax("'OR' outside parentheses"));
                }
                groups.push(alloc::vec![word.to_lowercase()]);
                rest = rest[end..].trim_start();
            }
        }
        if groups.is_empty() {
            return Err(syntax("no keyword groups"));
        }
        ThematicField::new(name, groups)
    }
}

/// True iff every AND-group has at least one keyword present as a whole
/// lowercase token of the tweet text (tokens per [`mining::tokenize`]).
pub fn match_thematic_field(tweet: &Tweet, field: &ThematicField) -> bool {
    let tokens = mining::tokenize(&tweet.text);
    field
        .groups
        .iter()
        .all(|group| group.iter().any(|kw| tokens.items.contains(kw)))
}

/// Daily counts of matching tweets from the earliest to the latest match.
/// Gap days hold zero.
pub fn count_time_series(
    corpus: &Corpus,
    field: &ThematicField,
) -> Result<CountTimeSeries, CorpusError> {
    let mut days: Vec<i64> = corpus
        .tweets()
        .iter()
        .filter(|t| match_thematic_field(t, field))
        .map(|t| t.created_at.date().days())
        .collect();
    if days.is_empty() {
        return Err(CorpusError::EmptyTrend(field.name.clone()));
    }
    days.sort_unstable();
    let first = days[0];
    let last = *days.last().unwrap();
    let mut values = alloc::vec![0.0; (last - first + 1) as usize];
    for day in days {
        values[(day - first) as usize] += 1.0;
    }
    Ok(CountTimeSeries {
        start_day: UtcDate::from_days(first),
        values,
    })
}

/// Trailing-window rolling mean with partial fill at the head:
/// `out[i] = mean(values[max(0, i-window+1) ..= i])`. Output length equals
/// input length.
pub fn rolling_mean(
    series: &CountTimeSeries,
    window: usize,
) -> Result<CountTimeSeries, CorpusError> {
    if window == 0 {
        return Err(CorpusError::ZeroWindow);
    }
    let values = &series.values;
    let mut out = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let lo = (i + 1).saturating_sub(window);
        let slice = &values[lo..=i];
        out.push(slice.iter().sum::<f64>() / slice.len() as f64);
    }
    Ok(CountTimeSeries {
        start_day: series.start_day,
        values: out,
    })
}

fn zscore_values(values: &[f64]) -> Result<Vec<f64>, CorpusError> {
    if values.len() < 2 {
        return Err(CorpusError::TooShort(values.len()));
    }
    let mean = mathx::mean(values);
    let sd = mathx::population_sd(values);
    if sd == 0.0 {
        return Err(CorpusError::ZeroVariance);
    }
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Centers and scales with the population (divide-by-N) standard deviation.
pub fn zscore(series: &CountTimeSeries) -> Result<CountTimeSeries, CorpusError> {
    Ok(CountTimeSeries {
        start_day: series.start_day,
        values: zscore_values(&series.values)?,
    })
}

impl PriceSeries {
    /// Validates the invariants: strictly increasing dates, positive prices.
    pub fn new(entries: Vec<(UtcDate, f64)>) -> Result<Self, CorpusError> {
        for window in entries.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(CorpusError::NonMonotonePrices(window[1].0.to_string()));
            }
        }
        for (date, price) in &entries {
            if !(price.is_finite() && *price > 0.0) {
                return Err(CorpusError::NonPositivePrice(date.to_string()));
            }
        }
        Ok(PriceSeries { entries })
    }
}

/// Joins a (rolling-mean) tweet series with a price series on the dates both
/// cover, then z-scores each column. Non-trading days drop out of the join.
pub fn align_for_regression(
    tweets: &CountTimeSeries,
    prices: &PriceSeries,
) -> Result<RegressionData, CorpusError> {
    let start = tweets.start_day.days();
    let end = start + tweets.values.len() as i64;
    let mut dates = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &(date, price) in &prices.entries {
        let day = date.days();
        if day >= start && day < end {
            dates.push(date);
            x.push(tweets.values[(day - start) as usize]);
            y.push(price);
        }
    }
    if dates.len() < 3 {
        return Err(CorpusError::InsufficientOverlap(dates.len()));
    }
    Ok(RegressionData {
        dates,
        x: zscore_values(&x)?,
        y: zscore_values(&y)?,
    })
}
