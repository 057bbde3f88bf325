//! `train`, `classify`, and `detect-generated`: the classifier lifecycle.

use std::path::{Path, PathBuf};

use serde::Serialize;
use trendlens_core::corpus::Corpus;
use trendlens_core::features::{truncated_svd, SvdFactors};
use trendlens_core::neural::{
    detect_generated, encode_corpus, evaluate, prepare_dataset, train, Classifier, Dataset,
    EvalReport, ModelConfig, TrainConfig,
};

use super::{encode_state, ensure_out_dir, out_path, write_text, EncodeState};
use crate::error::Error;
use crate::io::checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
use crate::io::factors::{load_factors, save_factors};
use crate::io::{corpus_file, csvx};

pub struct TrainOpts {
    pub corpus: PathBuf,
    pub min_retweets: u64,
    pub svd_k: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub model: PathBuf,
    pub out: PathBuf,
}

pub struct ClassifyOpts {
    pub corpus: PathBuf,
    pub model: PathBuf,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct EvalJson {
    accuracy: f64,
    labels: Vec<String>,
    precision: Vec<f64>,
    recall: Vec<f64>,
    f1: Vec<f64>,
    confusion: Vec<Vec<usize>>,
}

impl EvalJson {
    fn new(report: &EvalReport, labels: &[String]) -> Self {
        EvalJson {
            accuracy: report.accuracy,
            labels: labels.to_vec(),
            precision: report.precision.clone(),
            recall: report.recall.clone(),
            f1: report.f1.clone(),
            confusion: report.confusion.clone(),
        }
    }
}

/// Path of the factors file that always travels with a checkpoint.
pub fn factors_path(model: &Path) -> PathBuf {
    let mut name = model.file_name().unwrap_or_default().to_os_string();
    name.push(".factors");
    model.with_file_name(name)
}

fn build_factors(state: &EncodeState, svd_k: usize, seed: u64) -> Result<SvdFactors, Error> {
    let d = state.tfidf.doc_count();
    let v = state.tfidf.vocab_size;
    let k = svd_k.min(d).min(v).max(1);
    Ok(truncated_svd(&state.tfidf, k, seed)?)
}

pub fn run_train(opts: &TrainOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;
    let state = encode_state(&corpus)?;
    let factors = build_factors(&state, opts.svd_k, opts.seed)?;

    let dataset = prepare_dataset(
        &corpus,
        opts.min_retweets,
        &state.tfidf,
        &state.vocab,
        &factors,
        64,
    )?;
    let config = ModelConfig::standard(
        state.vocab.total_size(),
        factors.k,
        dataset.labels.len().max(2),
    );
    if dataset.labels.len() < 2 {
        return Err(Error::input(format!(
            "training needs at least two distinct labels, got {:?}",
            dataset.labels
        )));
    }

    let mut model = Classifier::new(config.clone(), opts.seed)?;
    let history = train(
        &mut model,
        &dataset.examples,
        &TrainConfig {
            epochs: opts.epochs,
            learning_rate: opts.learning_rate,
            batch_size: opts.batch_size,
            seed: opts.seed,
        },
    )?;

    let meta = CheckpointMeta {
        config: (&config).into(),
        labels: dataset.labels.clone(),
        tfidf_width: state.tfidf.vocab_size,
        min_retweets: opts.min_retweets,
    };
    save_checkpoint(&opts.model, &model, &meta)?;
    save_factors(&factors_path(&opts.model), &factors)?;

    ensure_out_dir(&opts.out)?;
    let mut csv = String::from("epoch,loss\n");
    for (epoch, loss) in history.iter().enumerate() {
        csv.push_str(&format!("{epoch},{loss}\n"));
    }
    write_text(&out_path(&opts.out, "history.csv"), &csv)?;

    let report = evaluate(&model, &dataset.examples)?;
    write_text(
        &out_path(&opts.out, "eval.json"),
        &serde_json::to_string_pretty(&EvalJson::new(&report, &dataset.labels))
            .expect("serializable report"),
    )?;
    Ok(())
}

/// Loads a checkpoint and re-encodes `corpus` against it, validating every
/// dimension the encoding depends on.
fn load_for_inference(
    corpus: &Corpus,
    model_path: &Path,
) -> Result<(Classifier, CheckpointMeta, EncodeState, SvdFactors), Error> {
    let (model, meta) = load_checkpoint(model_path)?;
    let factors = load_factors(&factors_path(model_path))?;
    let state = encode_state(corpus)?;
    if state.tfidf.vocab_size != meta.tfidf_width {
        return Err(Error::input(format!(
            "dimension mismatch: checkpoint expects a TF-IDF width of {}, corpus yields {}",
            meta.tfidf_width, state.tfidf.vocab_size
        )));
    }
    if state.vocab.total_size() != meta.config.vocab_size {
        return Err(Error::input(format!(
            "dimension mismatch: checkpoint vocabulary has {} ids, corpus yields {}",
            meta.config.vocab_size,
            state.vocab.total_size()
        )));
    }
    Ok((model, meta, state, factors))
}

fn labeled_dataset(
    corpus: &Corpus,
    meta: &CheckpointMeta,
    state: &EncodeState,
    factors: &SvdFactors,
) -> Result<Option<Dataset>, Error> {
    let any_labeled = corpus.tweets().iter().any(|t| t.label.is_some());
    if !any_labeled {
        return Ok(None);
    }
    let dataset = prepare_dataset(corpus, 0, &state.tfidf, &state.vocab, factors, 64)?;
    if dataset.labels != meta.labels {
        return Err(Error::input(format!(
            "corpus labels {:?} differ from the checkpoint's {:?}",
            dataset.labels, meta.labels
        )));
    }
    Ok(Some(dataset))
}

pub fn run_classify(opts: &ClassifyOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;
    let (model, meta, state, factors) = load_for_inference(&corpus, &opts.model)?;
    ensure_out_dir(&opts.out)?;

    let encoded = encode_corpus(&corpus, &state.tfidf, &state.vocab, &factors, 64)?;
    let mut csv = String::from("id,predicted_label\n");
    for (tweet, input) in corpus.tweets().iter().zip(&encoded) {
        let class = trendlens_core::neural::predict(&model, input)?;
        csv.push_str(&format!(
            "{},{}\n",
            csvx::escape(&tweet.id),
            csvx::escape(&meta.labels[class])
        ));
    }
    write_text(&out_path(&opts.out, "predictions.csv"), &csv)?;

    if let Some(dataset) = labeled_dataset(&corpus, &meta, &state, &factors)? {
        let report = evaluate(&model, &dataset.examples)?;
        write_text(
            &out_path(&opts.out, "eval.json"),
            &serde_json::to_string_pretty(&EvalJson::new(&report, &meta.labels))
                .expect("serializable report"),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SharesJson {
    shares: Vec<Share>,
    report: String,
}

#[derive(Serialize)]
struct Share {
    class: String,
    percent: f64,
}

pub fn run_detect(opts: &ClassifyOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;
    let (model, meta, state, factors) = load_for_inference(&corpus, &opts.model)?;
    let encoded = encode_corpus(&corpus, &state.tfidf, &state.vocab, &factors, 64)?;
    let report = detect_generated(&model, &encoded, &meta.labels)?;

    ensure_out_dir(&opts.out)?;
    let json = SharesJson {
        shares: report
            .shares
            .iter()
            .map(|(class, percent)| Share {
                class: class.clone(),
                percent: *percent,
            })
            .collect(),
        report: report.report_line(),
    };
    write_text(
        &out_path(&opts.out, "shares.json"),
        &serde_json::to_string_pretty(&json).expect("serializable report"),
    )?;
    write_text(
        &out_path(&opts.out, "shares.txt"),
        &(report.report_line() + "\n"),
    )?;
    Ok(())
}
