//! Citation-graph construction from paper metadata.
//!
//! Builds leakage-free citation networks: seed papers are sampled from a
//! post-cutoff window, their references resolved through arXiv-id extraction
//! first and budgeted fuzzy title search second, expanded two hops out, and
//! optionally matched back against a prior benchmark graph for pre-cutoff
//! nodes.

mod build;
mod ids;
mod matching;
mod resolver;
mod seeds;
mod stub;

pub use build::{build_citation_graph, BuildOptions, BuildReport, PriorGraph};
pub use ids::extract_arxiv_ids;
pub use matching::{normalized_levenshtein, title_match, MatchPolicy};
pub use resolver::{HttpResolver, HttpResolverConfig, Resolver, ScriptedResolver, TokenBucket};
pub use seeds::select_seeds;
pub use stub::PaperStub;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
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
    #[error("resolver transport failure: {0}")]
    Transport(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Graph(#[from] tagbench_core::CoreError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;
