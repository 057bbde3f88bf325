//! Corpus ingestion: UTF-8 files with one JSON tweet record per line.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use trendlens_core::corpus::{Corpus, Tweet};
use trendlens_core::time::Timestamp;

use crate::error::Error;

/// The wire schema of one corpus line.
#[derive(Debug, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub created_at: String,
    pub text: String,
    pub author: String,
    pub retweeters: Vec<String>,
    pub hashtags: Vec<String>,
    pub retweet_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl TweetRecord {
    fn into_tweet(self, line_no: usize) -> Result<Tweet, Error> {
        let created_at = Timestamp::parse(&self.created_at)
            .map_err(|e| Error::input(format!("line {line_no}: {e}")))?;
        Ok(Tweet {
            id: self.id,
            created_at,
            text: self.text,
            author: self.author,
            retweeters: self.retweeters,
            hashtags: self.hashtags,
            retweet_count: self.retweet_count,
            label: self.label,
        })
    }

    pub fn from_tweet(tweet: &Tweet) -> Self {
        TweetRecord {
            id: tweet.id.clone(),
            created_at: tweet.created_at.to_string(),
            text: tweet.text.clone(),
            author: tweet.author.clone(),
            retweeters: tweet.retweeters.clone(),
            hashtags: tweet.hashtags.clone(),
            retweet_count: tweet.retweet_count,
            label: tweet.label.clone(),
        }
    }
}

/// Loads a line-delimited JSON corpus, preserving input order. Malformed
/// lines and duplicate ids are hard errors naming the offending line.
pub fn load_corpus(path: &Path) -> Result<Corpus, Error> {
    let content = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read corpus {}: {e}", path.display())))?;
    let mut tweets = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: TweetRecord =
            serde_json::from_str(line).map_err(|e| Error::input(format!("line {line_no}: {e}")))?;
        tweets.push(record.into_tweet(line_no)?);
    }
    Ok(Corpus::from_tweets(tweets)?)
}

/// Writes a corpus back out in the same line-delimited format.
pub fn save_corpus(path: &Path, corpus: &Corpus) -> Result<(), Error> {
    let mut out = String::new();
    for tweet in corpus.tweets() {
        let record = TweetRecord::from_tweet(tweet);
        out.push_str(&serde_json::to_string(&record).expect("serializable record"));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
