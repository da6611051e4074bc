//! File formats, manifests, caching and the `langtree` command line on top
//! of `langtree-core`.

pub mod cache;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod suite;

pub use error::{CliError, Stage};
