//! File formats and pipeline commands for the trendlens toolkit.
//!
//! The analytics live in `trendlens-core`; this crate owns everything that
//! touches the filesystem: corpus and price ingestion, thematic-field
//! config parsing, CSV/JSON report emission, the SVD-factor and model
//! checkpoint binary formats, and the subcommand implementations behind the
//! `trendlens` binary.

pub mod commands;
pub mod error;
pub mod io;

pub use error::Error;
