//! On-disk formats: JSONL corpora, price CSVs, thematic-field configs,
//! edge-list CSVs, the SVD-factor binary, and model checkpoints.

pub mod checkpoint;
pub mod corpus_file;
pub mod csvx;
pub mod edgelist;
pub mod factors;
pub mod fields;
pub mod prices;
