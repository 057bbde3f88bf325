//! Analytics core for microblog news-trend forensics.
//!
//! The crate is organized around five pipelines that share one input record,
//! the [`corpus::Tweet`]:
//!
//! * [`corpus`] — thematic-field queries, daily count series, rolling means,
//!   z-scores, and alignment of tweet trends with price series.
//! * [`mining`] — keyword transactions, FP-growth frequent itemsets,
//!   association rules, and grouped rule matrices.
//! * [`features`] — retweeter-username TF-IDF and its truncated SVD.
//! * [`graphx`] — the retweet graph with communities, centralities, layout,
//!   and isolation diagnostics.
//! * [`bayes`] — Student-t Bayesian regression of prices on tweet trends.
//! * [`neural`] — a three-branch text classifier trained from scratch.
//!
//! Everything here is `no_std + alloc`: no files, no clocks, no threads.
//! File formats and the command-line front end live in the companion
//! `trendlens-cli` crate. All randomized routines take explicit seeds and are
//! bit-for-bit deterministic.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bayes;
pub mod corpus;
pub mod features;
pub mod graphx;
pub mod linalg;
pub mod mathx;
pub mod mining;
pub mod neural;
pub mod rng;
pub mod time;
