//! Adversarial ego-graph transformations: rewiring strategies, neighbor
//! dropping/adding, and the neighbor-rendering ablation. All operations are
//! pure seeded functions over [`tagbench_core::EgoGraph`], applied
//! identically to prompt rendering and (via [`apply_rewired_ego`]) to
//! message-passing baselines.

mod block;
mod drop;
mod rewire;
mod spec;
mod surgery;

pub use block::{render_ablation_prompt, render_neighbor_block};
pub use drop::{perturb_neighbors, round_half_up};
pub use rewire::{rewire, rewire_with_options, PathHop2};
pub use spec::{DropMode, DropSpec, NeighborStyle, PerturbationSpec, RewireKind};
pub use surgery::apply_rewired_ego;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerturbError {
    #[error("ego invariant violated: {0}")]
    InvariantViolation(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Prompt(#[from] tagbench_prompt::PromptError),
}

pub type Result<T> = std::result::Result<T, PerturbError>;
