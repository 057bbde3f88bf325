//! Independent oracles and synthetic-data generators for the trendlens test
//! suites.
//!
//! Nothing in here touches the production crates: every oracle is a separate
//! implementation (exhaustive enumeration, dense Jacobi SVD, exact rational
//! linear solves) so a test that compares production output against an oracle
//! is a genuine cross-check, not a tautology.

pub mod graphs;
pub mod itemsets;
pub mod rng;
pub mod svd;
pub mod synth;
