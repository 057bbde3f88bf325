//! Keyword transaction mining: tokenization, frequent itemsets via
//! FP-growth, association rules, and rule grouping for reports.

mod fpgrowth;
mod graph;
mod grouping;
mod rules;

pub use fpgrowth::{mine_frequent_itemsets, FrequentItemset};
pub use graph::{itemset_graph, rule_graph, GraphEdge, SemanticGraph};
pub use grouping::{group_rules, GroupedRuleMatrix, RuleGroup};
pub use rules::{derive_rules, filter_rules, AssociationRule};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// The deduplicated keyword set of one message.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transaction {
    pub items: BTreeSet<String>,
}

impl Transaction {
    /// Collects items as given, deduplicating only. [`tokenize`] is the
    /// producer that additionally enforces the stopword and length rules.
    pub fn from_items<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Transaction {
            items: items.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.items.contains(token)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MiningError {
    BadMinSupport(f64),
    BadMinConfidence(f64),
    ZeroMaxSize,
    NotSubsetClosed(Vec<String>),
    EmptyRuleList,
}

impl fmt::Display for MiningError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MiningError::BadMinSupport(v) => {
                write!(f, "min_support must lie in (0, 1], got {v}")
            }
            MiningError::BadMinConfidence(v) => {
                write!(f, "min_confidence must lie in (0, 1], got {v}")
            }
            MiningError::ZeroMaxSize => write!(f, "max_size must be at least 1"),
            MiningError::NotSubsetClosed(items) => {
                write!(f, "itemset list is not subset-closed near {items:?}")
            }
            MiningError::EmptyRuleList => write!(f, "cannot group an empty rule list"),
        }
    }
}

impl core::error::Error for MiningError {}

/// Minimal English stopword list, frozen here so every mining result is
/// reproducible from the repository alone. `rt` and `amp` cover retweet
/// markers and HTML-escaped ampersands common in microblog text.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "after", "again", "all", "also", "amp", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "but", "by", "can", "could", "did", "do", "does",
    "for", "from", "had", "has", "have", "he", "her", "here", "him", "his", "how", "i", "if", "in",
    "into", "is", "it", "its", "just", "me", "more", "most", "my", "no", "not", "now", "of", "on",
    "only", "or", "other", "our", "out", "over", "own", "rt", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "them", "then", "there", "these", "they",
    "this", "those", "through", "to", "too", "under", "up", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you",
    "your",
];

fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

fn is_url(word: &str) -> bool {
    let lower = word.to_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Ordered token sequence: lowercased, split on non-alphanumerics with
/// apostrophes kept inside words, URLs and `@`-mentions dropped, `#` stripped
/// from hashtags, tokens shorter than two characters dropped. Duplicates and
/// stopwords are kept; this is the sequence form consumed by the classifier.
pub fn token_stream(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        if word.starts_with('@') || is_url(word) {
            continue;
        }
        let word = word.strip_prefix('#').unwrap_or(word);
        let lower = word.to_lowercase();
        let mut chars = lower.chars().peekable();
        let mut buf = String::new();
        let flush = |buf: &mut String, out: &mut Vec<String>| {
            if buf.chars().count() >= 2 {
                out.push(buf.clone());
            }
            buf.clear();
        };
        while let Some(c) = chars.next() {
            let interior_apostrophe =
                c == '\'' && !buf.is_empty() && chars.peek().is_some_and(|n| n.is_alphanumeric());
            if c.is_alphanumeric() || interior_apostrophe {
                buf.push(c);
            } else {
                flush(&mut buf, &mut out);
            }
        }
        flush(&mut buf, &mut out);
    }
    out
}

/// The transaction form of a text: [`token_stream`] minus stopwords, as a
/// deduplicated set.
pub fn tokenize(text: &str) -> Transaction {
    Transaction {
        items: token_stream(text)
            .into_iter()
            .filter(|t| !is_stopword(t))
            .collect(),
    }
}

/// Per-token transaction counts, descending by count with lexicographic
/// tie-breaks. Each transaction counts once per token it contains.
pub fn keyword_frequencies(transactions: &[Transaction]) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in transactions {
        for item in &t.items {
            *counts.entry(item).or_insert(0) += 1;
        }
    }
    let mut out: Vec<(String, usize)> = counts
        .into_iter()
        .map(|(token, count)| (token.to_string(), count))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn stopword_list_is_sorted_for_binary_search() {
        let mut sorted = STOPWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, STOPWORDS);
    }

    #[test]
    fn tokenize_applies_every_rule() {
        let t = tokenize("Ukraine's NAZI #fake http://x.co @bob");
        let items: Vec<&str> = t.items.iter().map(|s| s.as_str()).collect();
        assert_eq!(items, vec!["fake", "nazi", "ukraine's"]);
    }

    #[test]
    fn tokenize_empty_and_stopword_only() {
        assert!(tokenize("").items.is_empty());
        assert!(tokenize("the and of").items.is_empty());
    }

    #[test]
    fn tokenize_drops_short_tokens_and_splits_hyphens() {
        let t = tokenize("neo-nazi x 22");
        let items: Vec<&str> = t.items.iter().map(|s| s.as_str()).collect();
        assert_eq!(items, vec!["22", "nazi", "neo"]);
    }

    #[test]
    fn token_stream_keeps_order_duplicates_and_stopwords() {
        let s = token_stream("The war the WAR");
        assert_eq!(s, vec!["the", "war", "the", "war"]);
    }

    #[test]
    fn apostrophe_kept_only_inside_words() {
        let s = token_stream("'quoted' rock'n'roll trailing' ukraine's");
        assert_eq!(s, vec!["quoted", "rock'n'roll", "trailing", "ukraine's"]);
    }

    #[test]
    fn keyword_frequencies_count_transactions_not_occurrences() {
        let ts = vec![
            Transaction::from_items(["alpha", "beta"]),
            Transaction::from_items(["alpha"]),
        ];
        assert_eq!(
            keyword_frequencies(&ts),
            vec![("alpha".to_string(), 2), ("beta".to_string(), 1)]
        );
        assert!(keyword_frequencies(&[]).is_empty());
    }

    #[test]
    fn keyword_frequencies_tie_break_is_lexicographic() {
        let ts = vec![
            Transaction::from_items(["bb"]),
            Transaction::from_items(["aa"]),
        ];
        assert_eq!(
            keyword_frequencies(&ts),
            vec![("aa".to_string(), 1), ("bb".to_string(), 1)]
        );
    }
}
