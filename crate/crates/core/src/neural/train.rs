//! Training loop (Adam), evaluation metrics, and the generated-text share
//! report.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::model::{Classifier, Tensor};
use super::{Encoded, Example, NeuralError};
use crate::mathx;
use crate::rng::Rng;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            learning_rate: 5e-3,
            batch_size: 8,
            seed: 0,
        }
    }
}

/// Inverse-frequency class weights; classes absent from the dataset weigh 1.
pub fn class_weights(examples: &[Example], classes: usize) -> Vec<f64> {
    let mut counts = alloc::vec![0usize; classes];
    for e in examples {
        counts[e.label] += 1;
    }
    let total: usize = counts.iter().sum();
    counts
        .iter()
        .map(|&c| {
            if c == 0 {
                1.0
            } else {
                total as f64 / (classes as f64 * c as f64)
            }
        })
        .collect()
}

/// Trains in place with Adam; returns the per-epoch mean loss history.
/// Deterministic given the seed: initialization, shuffling, and updates all
/// derive from it.
pub fn train(
    model: &mut Classifier,
    dataset: &[Example],
    config: &TrainConfig,
) -> Result<Vec<f64>, NeuralError> {
    if dataset.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    let weights = class_weights(dataset, model.config.classes);
    let batch_size = config.batch_size.max(1);

    let mut rng = Rng::seed_from_u64(config.seed);
    let mut moment1: BTreeMap<String, Tensor> = model
        .params()
        .iter()
        .map(|(n, t)| (n.clone(), Tensor::zeros(&t.shape)))
        .collect();
    let mut moment2 = moment1.clone();
    let mut step = 0u64;

    let mut history = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        let mut seen = 0usize;
        for (batch_no, chunk) in order.chunks(batch_size).enumerate() {
            let batch: Vec<Example> = chunk.iter().map(|&i| dataset[i].clone()).collect();
            let (loss, grads) = model.loss_and_grad(&batch, &weights)?;
            if !loss.is_finite() {
                return Err(NeuralError::NonFiniteLoss {
                    epoch,
                    batch: batch_no,
                });
            }
            epoch_loss += loss * batch.len() as f64;
            seen += batch.len();

            step += 1;
            let bias1 = 1.0 - mathx::powf(ADAM_BETA1, step as f64);
            let bias2 = 1.0 - mathx::powf(ADAM_BETA2, step as f64);
            for (name, tensor) in model.params_mut().iter_mut() {
                let g = &grads[name];
                let m = moment1.get_mut(name).unwrap();
                let v = moment2.get_mut(name).unwrap();
                for i in 0..tensor.data.len() {
                    m.data[i] = ADAM_BETA1 * m.data[i] + (1.0 - ADAM_BETA1) * g.data[i];
                    v.data[i] = ADAM_BETA2 * v.data[i] + (1.0 - ADAM_BETA2) * g.data[i] * g.data[i];
                    let m_hat = m.data[i] / bias1;
                    let v_hat = v.data[i] / bias2;
                    tensor.data[i] -=
                        config.learning_rate * m_hat / (mathx::sqrt(v_hat) + ADAM_EPS);
                }
            }
        }
        history.push(epoch_loss / seen as f64);
    }
    Ok(history)
}

/// Per-class precision/recall/F1 plus accuracy and the confusion matrix
/// (rows = true class, columns = predicted).
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub confusion: Vec<Vec<usize>>,
}

/// Argmax class, ties resolved toward the smaller index.
pub fn predict(model: &Classifier, input: &Encoded) -> Result<usize, NeuralError> {
    let probs = model.forward(input)?;
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    Ok(best)
}

impl EvalReport {
    /// Metrics from a confusion matrix (rows = true class, columns =
    /// predicted). Precision, recall, and F1 are 0 where undefined.
    pub fn from_confusion(confusion: Vec<Vec<usize>>) -> Self {
        let classes = confusion.len();
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..classes).map(|c| confusion[c][c]).sum();

        let mut precision = alloc::vec![0.0; classes];
        let mut recall = alloc::vec![0.0; classes];
        let mut f1 = alloc::vec![0.0; classes];
        for c in 0..classes {
            let tp = confusion[c][c] as f64;
            let predicted: f64 = (0..classes).map(|r| confusion[r][c] as f64).sum();
            let support: f64 = confusion[c].iter().map(|&v| v as f64).sum();
            precision[c] = if predicted > 0.0 { tp / predicted } else { 0.0 };
            recall[c] = if support > 0.0 { tp / support } else { 0.0 };
            f1[c] = if precision[c] + recall[c] > 0.0 {
                2.0 * precision[c] * recall[c] / (precision[c] + recall[c])
            } else {
                0.0
            };
        }

        EvalReport {
            accuracy: correct as f64 / total as f64,
            precision,
            recall,
            f1,
            confusion,
        }
    }
}

pub fn evaluate(model: &Classifier, dataset: &[Example]) -> Result<EvalReport, NeuralError> {
    if dataset.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }
    let classes = model.config.classes;
    let mut confusion = alloc::vec![alloc::vec![0usize; classes]; classes];
    for example in dataset {
        let predicted = predict(model, &example.input)?;
        confusion[example.label][predicted] += 1;
    }
    Ok(EvalReport::from_confusion(confusion))
}

/// The canonical class order of the generated-text share report.
pub const GENERATED_CLASSES: [&str; 4] = ["human", "gpt2", "rnn", "other"];

/// Percentage of inputs assigned to each generated-text class.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareReport {
    /// (class, percentage) in canonical order; percentages sum to 100.
    pub shares: Vec<(String, f64)>,
}

impl ShareReport {
    /// Human-readable one-liner, e.g. `human - 80%, gpt2 - 10%, ...`.
    pub fn report_line(&self) -> String {
        let parts: Vec<String> = self
            .shares
            .iter()
            .map(|(class, pct)| {
                let mut num = alloc::format!("{pct:.2}");
                while num.ends_with('0') {
                    num.pop();
                }
                if num.ends_with('.') {
                    num.pop();
                }
                alloc::format!("{class} - {num}%")
            })
            .collect();
        parts.join(", ")
    }
}

/// Classifies every input with a human/gpt2/rnn/other model and reports the
/// class shares. `labels` is the model's class-name table.
pub fn detect_generated(
    model: &Classifier,
    inputs: &[Encoded],
    labels: &[String],
) -> Result<ShareReport, NeuralError> {
    let mut sorted: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
    sorted.sort_unstable();
    let mut expected: Vec<&str> = GENERATED_CLASSES.to_vec();
    expected.sort_unstable();
    if sorted != expected || model.config.classes != 4 {
        return Err(NeuralError::WrongClasses(labels.to_vec()));
    }
    if inputs.is_empty() {
        return Err(NeuralError::EmptyDataset);
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for input in inputs {
        let class = predict(model, input)?;
        *counts.entry(labels[class].as_str()).or_insert(0) += 1;
    }
    let total = inputs.len() as f64;
    let shares = GENERATED_CLASSES
        .iter()
        .map(|&class| {
            let count = counts.get(class).copied().unwrap_or(0);
            (class.to_string(), 100.0 * count as f64 / total)
        })
        .collect();
    Ok(ShareReport { shares })
}
