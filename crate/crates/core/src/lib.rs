//! Text-attributed graph primitives for node-classification benchmarking.
//!
//! A [`TextAttributedGraph`] is a directed graph whose nodes carry a title,
//! an optional body text, an optional label and an optional year. This crate
//! loads such graphs from JSONL/TSV files, assigns train/validation/test
//! splits, samples test nodes, and extracts capped ego-graphs around target
//! nodes with deterministic seeded sampling.

mod ego;
mod load;
mod rng;
mod split;
pub mod synth;
mod types;

pub use ego::{extract_ego_graph, local_homophily_ratio, EgoGraph, HopCaps};
pub use load::{load_graph, LoadStats};
pub use rng::{derived_rng, stable_hash64, GENERATOR_VERSION};
pub use split::{sample_test_nodes, split_by_ratio, split_by_year, SplitAssignment};
pub use types::{NodeRecord, Split, TextAttributedGraph};

use thiserror::Error;

/// Errors raised by graph loading, validation, splitting and ego extraction.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown node id: {0}")]
    UnknownNode(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("homophily ratio undefined: {0}")]
    UndefinedHomophily(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
