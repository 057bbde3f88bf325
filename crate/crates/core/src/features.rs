//! Retweeter-username TF-IDF and its truncated SVD: the dense feature
//! vectors feeding the classifier's third branch.
//!
//! Conventions frozen for reproducibility: smoothed idf
//! `ln((1+D)/(1+df)) + 1`, L2-normalized rows, and randomized subspace
//! iteration (oversampling 8, four power iterations) for the truncation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{onesided_jacobi_svd, orthonormalize_columns, Mat};
use crate::mathx;
use crate::rng::Rng;

/// Bijective token-to-column map with dense indices `0..len`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VocabIndex {
    index: BTreeMap<String, u32>,
    tokens: Vec<String>,
}

impl VocabIndex {
    /// Builds from any token iterator; duplicates collapse and columns are
    /// assigned in sorted token order.
    pub fn build<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let unique: alloc::collections::BTreeSet<String> =
            tokens.into_iter().map(Into::into).collect();
        let tokens: Vec<String> = unique.into_iter().collect();
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        VocabIndex { index, tokens }
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Sparse document-term matrix; each row holds (column, value) pairs sorted
/// by column, L2-normalized unless empty.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDocTermMatrix {
    pub rows: Vec<Vec<(u32, f64)>>,
    pub vocab_size: usize,
}

/// Truncated SVD factors: `left` is D x k, `right` is V x k, singular values
/// descending.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdFactors {
    pub k: usize,
    pub left: Mat,
    pub singular: Vec<f64>,
    pub right: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureError {
    KOutOfRange { k: usize, max: usize },
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for FeatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureError::KOutOfRange { k, max } => {
                write!(f, "svd rank {k} out of range 1..={max}")
            }
            FeatureError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl core::error::Error for FeatureError {}

/// Builds the TF-IDF matrix over `docs` (one username list per document).
/// Usernames absent from `vocab` are dropped; the second return value counts
/// the dropped occurrences.
pub fn build_tfidf(docs: &[Vec<String>], vocab: &VocabIndex) -> (SparseDocTermMatrix, usize) {
    let d = docs.len();
    let mut dropped = 0usize;

    let mut counted: Vec<BTreeMap<u32, usize>> = Vec::with_capacity(d);
    let mut df: BTreeMap<u32, usize> = BTreeMap::new();
    for doc in docs {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for name in doc {
            match vocab.get(name) {
                Some(col) => *counts.entry(col).or_insert(0) += 1,
                None => dropped += 1,
            }
        }
        for &col in counts.keys() {
            *df.entry(col).or_insert(0) += 1;
        }
        counted.push(counts);
    }

    let rows = counted
        .into_iter()
        .map(|counts| {
            let mut row: Vec<(u32, f64)> = counts
                .into_iter()
                .map(|(col, tf)| {
                    let idf = mathx::ln((1.0 + d as f64) / (1.0 + df[&col] as f64)) + 1.0;
                    (col, tf as f64 * idf)
                })
                .collect();
            let norm = mathx::sqrt(row.iter().map(|(_, v)| v * v).sum::<f64>());
            if norm > 0.0 {
                for (_, v) in row.iter_mut() {
                    *v /= norm;
                }
            }
            row
        })
        .collect();

    (
        SparseDocTermMatrix {
            rows,
            vocab_size: vocab.len(),
        },
        dropped,
    )
}

impl SparseDocTermMatrix {
    pub fn doc_count(&self) -> usize {
        self.rows.len()
    }

    /// self * dense (D x V times V x p).
    fn right_multiply(&self, dense: &Mat) -> Mat {
        assert_eq!(self.vocab_size, dense.rows);
        let mut out = Mat::zeros(self.rows.len(), dense.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(col, v) in row {
                for j in 0..dense.cols {
                    *out.at_mut(i, j) += v * dense.at(col as usize, j);
                }
            }
        }
        out
    }

    /// self^T * dense (V x D times D x p).
    fn left_multiply_transposed(&self, dense: &Mat) -> Mat {
        assert_eq!(self.rows.len(), dense.rows);
        let mut out = Mat::zeros(self.vocab_size, dense.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(col, v) in row {
                for j in 0..dense.cols {
                    *out.at_mut(col as usize, j) += v * dense.at(i, j);
                }
            }
        }
        out
    }
}

const OVERSAMPLING: usize = 8;
const POWER_ITERATIONS: usize = 4;

/// Top-k factors by randomized subspace iteration; deterministic per seed.
pub fn truncated_svd(
    matrix: &SparseDocTermMatrix,
    k: usize,
    seed: u64,
) -> Result<SvdFactors, FeatureError> {
    let d = matrix.doc_count();
    let v = matrix.vocab_size;
    let max = d.min(v);
    if k == 0 || k > max {
        return Err(FeatureError::KOutOfRange { k, max });
    }
    let p = (k + OVERSAMPLING).min(max);

    let mut rng = Rng::seed_from_u64(seed);
    let mut omega = Mat::zeros(v, p);
    for r in 0..v {
        for c in 0..p {
            *omega.at_mut(r, c) = rng.normal();
        }
    }

    let mut q = matrix.right_multiply(&omega);
    orthonormalize_columns(&mut q);
    for _ in 0..POWER_ITERATIONS {
        let mut z = matrix.left_multiply_transposed(&q);
        orthonormalize_columns(&mut z);
        q = matrix.right_multiply(&z);
        orthonormalize_columns(&mut q);
    }

    // Core matrix B = Q^T A, factored through its transpose (V x p, tall).
    let b_t = matrix.left_multiply_transposed(&q);
    let (right_full, s, j) = onesided_jacobi_svd(&b_t);
    let u_full = q.matmul(&j);

    let mut left = Mat::zeros(d, k);
    let mut right = Mat::zeros(v, k);
    let mut singular = alloc::vec![0.0; k];
    for c in 0..k {
        singular[c] = s[c];
        for r in 0..d {
            *left.at_mut(r, c) = u_full.at(r, c);
        }
        for r in 0..v {
            *right.at_mut(r, c) = right_full.at(r, c);
        }
    }

    // Sign canonicalization: the largest-magnitude entry of each right
    // vector is made positive, keeping factors unique across runs and seeds.
    for c in 0..k {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..v {
            let a = mathx::abs(right.at(r, c));
            if a > best_abs + 1e-15 {
                best_abs = a;
                best = r;
            }
        }
        if right.at(best, c) < 0.0 {
            for r in 0..v {
                *right.at_mut(r, c) = -right.at(r, c);
            }
            for r in 0..d {
                *left.at_mut(r, c) = -left.at(r, c);
            }
        }
    }

    Ok(SvdFactors {
        k,
        left,
        singular,
        right,
    })
}

/// Component scores of one document row: `row * right * diag(1/s)`; slots
/// with a vanished singular value are zero. The row must be expressed over
/// the same vocabulary width the factors were built from.
pub fn project(
    factors: &SvdFactors,
    row: &[(u32, f64)],
    dim: usize,
) -> Result<Vec<f64>, FeatureError> {
    if dim != factors.right.rows {
        return Err(FeatureError::DimensionMismatch {
            expected: factors.right.rows,
            got: dim,
        });
    }
    let mut out = alloc::vec![0.0; factors.k];
    for &(col, v) in row {
        for (j, slot) in out.iter_mut().enumerate() {
            *slot += v * factors.right.at(col as usize, j);
        }
    }
    for (j, slot) in out.iter_mut().enumerate() {
        if factors.singular[j] > 0.0 {
            *slot /= factors.singular[j];
        } else {
            *slot = 0.0;
        }
    }
    Ok(out)
}
