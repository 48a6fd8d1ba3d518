//! Prompt rendering for ego-graph node classification.
//!
//! Every fixed phrase that reaches a predictor lives in a template file under
//! `templates/`; code only assembles and slot-fills those fragments. Golden
//! tests pin the rendered output byte-for-byte, so any template edit is a
//! deliberate, visible contract change.

mod fewshot;
mod profile;
mod ranked;
mod render;
mod style;
pub mod template;
#[doc(hidden)]
pub mod testkit;

pub use fewshot::{build_few_shot_exemplars, Exemplar};
pub use profile::{AnswerFormat, DatasetProfile};
pub use ranked::parse_ranked_list;
pub use render::{render_attention_stage2, render_prompt, render_system_prompt, PromptBundle};
pub use style::{all_styles, PromptStyle, StyleKind, TextContext, DEFAULT_ATTENTION_K};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("invalid prompt style: {0}")]
    InvalidStyle(String),
    #[error("rich context requires a body text on node {0}")]
    MissingBody(String),
    #[error("few-shot style requires exemplars")]
    MissingExemplars,
    #[error("exemplar shortage: found {found} correct predictions of {needed} within probe budget {budget}")]
    ExemplarShortage {
        found: usize,
        needed: usize,
        budget: usize,
    },
    #[error("no ranked list found in response")]
    UnparsableRanking,
    #[error("label index {index} outside profile vocabulary ({vocab_len} entries)")]
    LabelOutOfRange { index: usize, vocab_len: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("backend failure while probing exemplars: {0}")]
    Probe(String),
}

pub type Result<T> = std::result::Result<T, PromptError>;
