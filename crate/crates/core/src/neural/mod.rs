//! Three-branch text classifier built from scratch: a small pre-norm
//! transformer encoder over tweet tokens, a mean-reduced bag embedding over
//! the mixture of words and retweeter usernames, and a dense layer over the
//! truncated-SVD features. Branch outputs concatenate into one softmax head.
//!
//! Everything runs in f64 with hand-written forward and backward passes so
//! gradients can be verified against finite differences.

mod model;
mod train;

pub use model::{Classifier, Gradients, Tensor};
pub use train::{
    class_weights, detect_generated, evaluate, predict, train, EvalReport, ShareReport,
    TrainConfig, GENERATED_CLASSES,
};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::Corpus;
use crate::features::{project, SparseDocTermMatrix, SvdFactors};
use crate::mining;

/// Reserved token ids shared by the word and username spaces.
pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum NeuralError {
    BadConfig(String),
    DimensionMismatch(String),
    NoLabeledTweets,
    EmptyDataset,
    NonFiniteLoss { epoch: usize, batch: usize },
    WrongClasses(Vec<String>),
}

impl fmt::Display for NeuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeuralError::BadConfig(msg) => write!(f, "bad model config: {msg}"),
            NeuralError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            NeuralError::NoLabeledTweets => {
                write!(f, "no labeled tweets survive the retweet-count filter")
            }
            NeuralError::EmptyDataset => write!(f, "dataset is empty"),
            NeuralError::NonFiniteLoss { epoch, batch } => {
                write!(f, "non-finite loss at epoch {epoch}, batch {batch}")
            }
            NeuralError::WrongClasses(labels) => {
                write!(f, "expected classes human/gpt2/rnn/other, got {labels:?}")
            }
        }
    }
}

impl core::error::Error for NeuralError {}

/// Architecture description; the parameter count is a pure function of this.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub model_dim: usize,
    pub heads: usize,
    pub layers: usize,
    pub max_seq_len: usize,
    pub bag_dim: usize,
    pub svd_dim: usize,
    pub svd_hidden: usize,
    pub classes: usize,
    pub text_branch: bool,
    pub bag_branch: bool,
    pub svd_branch: bool,
}

impl ModelConfig {
    /// The default desk-scale configuration.
    pub fn standard(vocab_size: usize, svd_dim: usize, classes: usize) -> Self {
        ModelConfig {
            vocab_size,
            model_dim: 32,
            heads: 4,
            layers: 2,
            max_seq_len: 64,
            bag_dim: 16,
            svd_dim,
            svd_hidden: 16,
            classes,
            text_branch: true,
            bag_branch: true,
            svd_branch: true,
        }
    }

    /// Minimal configuration for gradient checking.
    pub fn tiny(vocab_size: usize, svd_dim: usize, classes: usize) -> Self {
        ModelConfig {
            vocab_size,
            model_dim: 8,
            heads: 2,
            layers: 1,
            max_seq_len: 12,
            bag_dim: 6,
            svd_dim,
            svd_hidden: 5,
            classes,
            text_branch: true,
            bag_branch: true,
            svd_branch: true,
        }
    }

    pub fn validate(&self) -> Result<(), NeuralError> {
        if self.model_dim == 0 || self.model_dim % self.heads != 0 {
            return Err(NeuralError::BadConfig(
                "model_dim must be a positive multiple of heads".to_string(),
            ));
        }
        if !(self.text_branch || self.bag_branch || self.svd_branch) {
            return Err(NeuralError::BadConfig(
                "at least one branch must be enabled".to_string(),
            ));
        }
        if self.classes < 2 {
            return Err(NeuralError::BadConfig(
                "need at least two classes".to_string(),
            ));
        }
        if self.vocab_size < 2 {
            return Err(NeuralError::BadConfig(
                "vocab must include pad and unk".to_string(),
            ));
        }
        Ok(())
    }

    /// Width of the concatenated branch vector feeding the head.
    pub fn concat_width(&self) -> usize {
        self.model_dim + self.bag_dim + self.svd_hidden
    }
}

/// Word and username ids merged into one space: 0 = pad, 1 = unk, words from
/// 2, usernames from 2 + word count. Words and usernames can never collide.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TokenVocab {
    words: BTreeMap<String, u32>,
    usernames: BTreeMap<String, u32>,
}

impl TokenVocab {
    /// Vocabulary over all tweet-text tokens (stopwords kept) and all
    /// retweeter usernames in the corpus.
    pub fn build(corpus: &Corpus) -> Self {
        let mut words: alloc::collections::BTreeSet<String> = Default::default();
        let mut usernames: alloc::collections::BTreeSet<String> = Default::default();
        for tweet in corpus.tweets() {
            words.extend(mining::token_stream(&tweet.text));
            usernames.extend(tweet.retweeters.iter().cloned());
        }
        let words: BTreeMap<String, u32> = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, 2 + i as u32))
            .collect();
        let offset = 2 + words.len() as u32;
        let usernames = usernames
            .into_iter()
            .enumerate()
            .map(|(i, u)| (u, offset + i as u32))
            .collect();
        TokenVocab { words, usernames }
    }

    pub fn total_size(&self) -> usize {
        2 + self.words.len() + self.usernames.len()
    }

    pub fn word_id(&self, token: &str) -> u32 {
        self.words.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn username_id(&self, name: &str) -> u32 {
        self.usernames.get(name).copied().unwrap_or(UNK_ID)
    }
}

/// Model-ready encoding of one tweet.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoded {
    /// transformer input, padded/truncated to `max_seq_len`, 0 = pad
    pub token_ids: Vec<u32>,
    /// word + username mixture for the bag branch
    pub bag_ids: Vec<u32>,
    /// projected SVD component scores
    pub svd_features: Vec<f64>,
}

/// One supervised example.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub input: Encoded,
    pub label: usize,
}

/// A labeled dataset with its class-name table (sorted, dense ids).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub labels: Vec<String>,
}

/// Encodes one tweet against the vocab, TF-IDF row, and SVD factors.
fn encode_tweet(
    text: &str,
    retweeters: &[String],
    tfidf_row: &[(u32, f64)],
    vocab: &TokenVocab,
    factors: &SvdFactors,
    vocab_width: usize,
    max_seq_len: usize,
) -> Result<Encoded, NeuralError> {
    let mut token_ids: Vec<u32> = mining::token_stream(text)
        .iter()
        .map(|t| vocab.word_id(t))
        .take(max_seq_len)
        .collect();
    let mut bag_ids: Vec<u32> = token_ids.clone();
    bag_ids.extend(retweeters.iter().map(|r| vocab.username_id(r)));
    token_ids.resize(max_seq_len, PAD_ID);

    let svd_features = project(factors, tfidf_row, vocab_width)
        .map_err(|e| NeuralError::DimensionMismatch(alloc::format!("{e}")))?;

    Ok(Encoded {
        token_ids,
        bag_ids,
        svd_features,
    })
}

/// Encodes every tweet of the corpus, labels ignored. Row `i` of `tfidf`
/// must correspond to tweet `i`.
pub fn encode_corpus(
    corpus: &Corpus,
    tfidf: &SparseDocTermMatrix,
    vocab: &TokenVocab,
    factors: &SvdFactors,
    max_seq_len: usize,
) -> Result<Vec<Encoded>, NeuralError> {
    if corpus.len() != tfidf.rows.len() {
        return Err(NeuralError::DimensionMismatch(alloc::format!(
            "corpus has {} tweets but tfidf has {} rows",
            corpus.len(),
            tfidf.rows.len()
        )));
    }
    corpus
        .tweets()
        .iter()
        .zip(&tfidf.rows)
        .map(|(tweet, row)| {
            encode_tweet(
                &tweet.text,
                &tweet.retweeters,
                row,
                vocab,
                factors,
                tfidf.vocab_size,
                max_seq_len,
            )
        })
        .collect()
}

/// Builds the supervised dataset: labeled tweets whose retweet count clears
/// `min_retweets`, encoded for all three branches. Class ids follow sorted
/// label order.
pub fn prepare_dataset(
    corpus: &Corpus,
    min_retweets: u64,
    tfidf: &SparseDocTermMatrix,
    vocab: &TokenVocab,
    factors: &SvdFactors,
    max_seq_len: usize,
) -> Result<Dataset, NeuralError> {
    if corpus.len() != tfidf.rows.len() {
        return Err(NeuralError::DimensionMismatch(alloc::format!(
            "corpus has {} tweets but tfidf has {} rows",
            corpus.len(),
            tfidf.rows.len()
        )));
    }
    let kept: Vec<(usize, &crate::corpus::Tweet, &str)> = corpus
        .tweets()
        .iter()
        .enumerate()
        .filter(|(_, t)| t.retweet_count >= min_retweets)
        .filter_map(|(i, t)| t.label.as_deref().map(|l| (i, t, l)))
        .collect();
    if kept.is_empty() {
        return Err(NeuralError::NoLabeledTweets);
    }

    let mut labels: Vec<String> = kept.iter().map(|(_, _, l)| l.to_string()).collect();
    labels.sort_unstable();
    labels.dedup();
    let label_id: BTreeMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let examples = kept
        .into_iter()
        .map(|(i, tweet, label)| {
            Ok(Example {
                input: encode_tweet(
                    &tweet.text,
                    &tweet.retweeters,
                    &tfidf.rows[i],
                    vocab,
                    factors,
                    tfidf.vocab_size,
                    max_seq_len,
                )?,
                label: label_id[label],
            })
        })
        .collect::<Result<Vec<_>, NeuralError>>()?;

    Ok(Dataset { examples, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tweet;
    use crate::features::{build_tfidf, truncated_svd, VocabIndex};
    use crate::time::Timestamp;
    use alloc::vec;

    fn tweet(id: &str, text: &str, retweeters: &[&str], count: u64, label: Option<&str>) -> Tweet {
        Tweet {
            id: id.to_string(),
            created_at: Timestamp::parse("2022-03-01T00:00:00Z").unwrap(),
            text: text.to_string(),
            author: "author".to_string(),
            retweeters: retweeters.iter().map(|s| s.to_string()).collect(),
            hashtags: vec![],
            retweet_count: count,
            label: label.map(|l| l.to_string()),
        }
    }

    fn pipeline(corpus: &Corpus) -> (SparseDocTermMatrix, TokenVocab, SvdFactors) {
        let users = VocabIndex::build(
            corpus
                .tweets()
                .iter()
                .flat_map(|t| t.retweeters.iter().cloned()),
        );
        let docs: Vec<Vec<String>> = corpus
            .tweets()
            .iter()
            .map(|t| t.retweeters.clone())
            .collect();
        let (tfidf, _) = build_tfidf(&docs, &users);
        let k = 2.min(tfidf.rows.len()).min(users.len()).max(1);
        let factors = truncated_svd(&tfidf, k, 7).unwrap();
        (tfidf, TokenVocab::build(corpus), factors)
    }

    fn fixture() -> Corpus {
        Corpus::from_tweets(vec![
            tweet(
                "1",
                "war report from the front",
                &["u1", "u2"],
                12,
                Some("fake"),
            ),
            tweet(
                "2",
                "calm day in the capital",
                &["u2", "u3"],
                3,
                Some("genuine"),
            ),
            tweet("3", "war escalates again", &["u1"], 20, Some("fake")),
            tweet("4", "no label here", &["u3"], 50, None),
        ])
        .unwrap()
    }

    #[test]
    fn vocab_separates_words_and_usernames() {
        let corpus = fixture();
        let vocab = TokenVocab::build(&corpus);
        let war = vocab.word_id("war");
        let u1 = vocab.username_id("u1");
        assert!(war >= 2);
        assert!(u1 >= 2 + vocab.words.len() as u32);
        assert_eq!(vocab.word_id("unseen-token"), UNK_ID);
        assert_eq!(vocab.username_id("nobody"), UNK_ID);
    }

    #[test]
    fn min_retweets_zero_keeps_all_labeled() {
        let corpus = fixture();
        let (tfidf, vocab, factors) = pipeline(&corpus);
        let ds = prepare_dataset(&corpus, 0, &tfidf, &vocab, &factors, 16).unwrap();
        assert_eq!(ds.examples.len(), 3); // unlabeled tweet excluded
        assert_eq!(ds.labels, vec!["fake", "genuine"]);
    }

    #[test]
    fn min_retweets_filters_below_threshold() {
        let corpus = fixture();
        let (tfidf, vocab, factors) = pipeline(&corpus);
        let ds = prepare_dataset(&corpus, 10, &tfidf, &vocab, &factors, 16).unwrap();
        assert_eq!(ds.examples.len(), 2);
        assert!(ds.examples.iter().all(|e| e.label == 0)); // both "fake"
    }

    #[test]
    fn all_filtered_is_an_error() {
        let corpus = fixture();
        let (tfidf, vocab, factors) = pipeline(&corpus);
        assert!(matches!(
            prepare_dataset(&corpus, 1000, &tfidf, &vocab, &factors, 16),
            Err(NeuralError::NoLabeledTweets)
        ));
    }

    #[test]
    fn encoding_pads_and_mixes_bag_ids() {
        let corpus = fixture();
        let (tfidf, vocab, factors) = pipeline(&corpus);
        let ds = prepare_dataset(&corpus, 0, &tfidf, &vocab, &factors, 16).unwrap();
        let first = &ds.examples[0].input;
        assert_eq!(first.token_ids.len(), 16);
        assert!(first.token_ids.iter().skip(5).all(|&id| id == PAD_ID));
        // bag carries both words and usernames
        assert!(first.bag_ids.contains(&vocab.word_id("war")));
        assert!(first.bag_ids.contains(&vocab.username_id("u1")));
        assert_eq!(first.svd_features.len(), factors.k);
    }

    #[test]
    fn config_invariants() {
        assert!(ModelConfig::standard(10, 4, 2).validate().is_ok());
        let mut c = ModelConfig::standard(10, 4, 2);
        c.model_dim = 30; // not divisible by 4 heads
        assert!(c.validate().is_err());
        let mut c = ModelConfig::standard(10, 4, 2);
        c.text_branch = false;
        c.bag_branch = false;
        c.svd_branch = false;
        assert!(c.validate().is_err());
        let mut c = ModelConfig::standard(10, 4, 2);
        c.classes = 1;
        assert!(c.validate().is_err());
    }
}
