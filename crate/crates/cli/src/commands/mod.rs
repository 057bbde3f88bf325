//! Subcommand implementations. Each `run` takes fully-resolved options and
//! writes its artifacts under the output directory; `main` owns flag
//! parsing and exit codes.

pub mod graph;
pub mod impact;
pub mod mine;
pub mod model;
pub mod trends;

use std::fs;
use std::path::{Path, PathBuf};

use trendlens_core::corpus::Corpus;
use trendlens_core::features::{build_tfidf, SparseDocTermMatrix, VocabIndex};
use trendlens_core::neural::TokenVocab;

use crate::error::Error;

pub(crate) fn ensure_out_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::input(format!("cannot create output dir {}: {e}", dir.display())))
}

pub(crate) fn write_text(path: &Path, content: &str) -> Result<(), Error> {
    fs::write(path, content)
        .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}

/// File-name-safe version of a thematic-field name.
pub(crate) fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// The shared encoding state for the classifier pipeline: retweeter TF-IDF
/// plus the word/username vocabulary.
pub(crate) struct EncodeState {
    pub tfidf: SparseDocTermMatrix,
    pub vocab: TokenVocab,
}

pub(crate) fn encode_state(corpus: &Corpus) -> Result<EncodeState, Error> {
    let users = VocabIndex::build(
        corpus
            .tweets()
            .iter()
            .flat_map(|t| t.retweeters.iter().cloned()),
    );
    if users.is_empty() {
        return Err(Error::input(
            "corpus has no retweeters; cannot build the TF-IDF feature branch",
        ));
    }
    let docs: Vec<Vec<String>> = corpus
        .tweets()
        .iter()
        .map(|t| t.retweeters.clone())
        .collect();
    let (tfidf, _) = build_tfidf(&docs, &users);
    Ok(EncodeState {
        tfidf,
        vocab: TokenVocab::build(corpus),
    })
}

pub(crate) fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
