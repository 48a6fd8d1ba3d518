//! Uniform predictor interface over remote chat-completion endpoints and
//! deterministic local oracles, with an append-only transcript cache for
//! byte-exact replay.

mod cache;
mod oracle;
mod parse;
mod remote;
mod request;

pub use cache::{cache_key, request_digest, CachedBackend, TranscriptCache};
pub use oracle::{keyword_label, majority_vote_label, KeywordOracle, MajorityVoteOracle};
pub use parse::{parse_answer, ParsedLabel};
pub use remote::{RemoteBackend, RemoteBackendConfig, RetryPolicy};
pub use request::{DecodingParams, EgoContext, Origin, PredictorRequest, RawResponse};

use thiserror::Error;

/// A predictor: takes staged user texts plus a system prompt, returns the
/// final assistant text. Implementations must be safe to share across
/// worker threads.
pub trait Predictor: Send + Sync {
    fn complete(&self, request: &PredictorRequest) -> Result<RawResponse>;
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend misconfigured: {0}")]
    Config(String),
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint returned status {status}: {body}")]
    Endpoint { status: u16, body: String },
    #[error("malformed endpoint payload: {0}")]
    Payload(String),
    #[error("cache io error on {path}: {source}")]
    CacheIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, BackendError>;
