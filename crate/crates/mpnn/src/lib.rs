//! Message-passing baselines built from scratch: a GCN with symmetric
//! normalization and a mean-aggregator SAGE, trained full batch with an
//! adaptive-moment optimizer. Gradients are hand-derived and checked against
//! central finite differences in the test suite.

mod features;
mod graph_ops;
mod model;
mod train;

pub use features::featurize;
pub use graph_ops::GraphOps;
pub use model::{accuracy_on, forward_logits, loss_and_gradients, predictions, ModelKind, ModelParams};
pub use train::{random_search, train, ScoreRow, SearchSpace, SplitIndices, TrainConfig, TrainResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MpnnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },
}

pub type Result<T> = std::result::Result<T, MpnnError>;
