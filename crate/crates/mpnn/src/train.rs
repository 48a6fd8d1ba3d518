use ndarray::Array2;
use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};
use tagbench_core::{derived_rng, Split, TextAttributedGraph};

use crate::model::{accuracy_on, loss_and_gradients, ModelKind, ModelParams};
use crate::{forward_logits, GraphOps, MpnnError, Result};

/// One training configuration. `random_search` samples these from the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub layers: usize,
    pub hidden: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    pub weight_decay: f64,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            layers: 2,
            hidden: 64,
            learning_rate: 0.01,
            dropout: 0.4,
            weight_decay: 0.001,
            max_epochs: 2000,
            patience: 100,
            seed: 0,
        }
    }
}

/// Node indices per split.
#[derive(Debug, Clone, Default)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    pub fn from_graph(graph: &TextAttributedGraph) -> Self {
        let mut out = Self::default();
        for (i, node) in graph.nodes().iter().enumerate() {
            match node.split {
                Split::Train => out.train.push(i),
                Split::Validation => out.val.push(i),
                Split::Test => out.test.push(i),
                Split::None => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub params: ModelParams,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    pub final_loss: f64,
    pub epochs_run: usize,
}

struct Adam {
    m: ModelParams,
    v: ModelParams,
    t: u64,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

impl Adam {
    fn new(params: &ModelParams) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }

    fn step(&mut self, params: &mut ModelParams, grads: &ModelParams, lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        for ((w, g), (m, v)) in params
            .matrices_mut()
            .zip(grads.matrices())
            .zip(self.m.matrices_mut().zip(self.v.matrices_mut()))
        {
            for ((w, &g), (m, v)) in w
                .iter_mut()
                .zip(g.iter())
                .zip(m.iter_mut().zip(v.iter_mut()))
            {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                *w -= lr * (*m / bc1) / ((*v / bc2).sqrt() + EPS);
            }
        }
    }
}

/// Full-batch training with adaptive moments, dropout at training time only,
/// and best-validation parameter tracking. Deterministic under
/// `config.seed`.
pub fn train(
    kind: ModelKind,
    ops: &GraphOps,
    features: &Array2<f64>,
    labels: &[Option<usize>],
    splits: &SplitIndices,
    classes: usize,
    config: &TrainConfig,
) -> Result<TrainResult> {
    if splits.train.is_empty() {
        return Err(MpnnError::Argument("empty training split".into()));
    }
    let mut init_rng = derived_rng("mpnn-init", &kind.to_string(), config.seed);
    let mut dropout_rng = derived_rng("mpnn-dropout", &kind.to_string(), config.seed);

    let mut params = ModelParams::init(
        kind,
        features.ncols(),
        config.hidden,
        config.layers,
        classes,
        &mut init_rng,
    )?;
    let mut adam = Adam::new(&params);

    let mut best_val = -1.0f64;
    let mut best_params = params.clone();
    let mut since_improvement = 0usize;
    let mut final_loss = f64::NAN;
    let mut epochs_run = 0usize;

    for epoch in 0..config.max_epochs {
        epochs_run = epoch + 1;
        let dropout = (config.dropout > 0.0)
            .then_some((config.dropout, &mut dropout_rng as &mut dyn rand::RngCore));
        let (loss, grads, _) = loss_and_gradients(
            &params,
            ops,
            features,
            labels,
            &splits.train,
            config.weight_decay,
            dropout,
        )?;
        if !loss.is_finite() {
            return Err(MpnnError::Diverged { epoch, loss });
        }
        final_loss = loss;
        adam.step(&mut params, &grads, config.learning_rate);

        let logits = forward_logits(&params, ops, features)?;
        let val_acc = accuracy_on(&logits, labels, &splits.val);
        if val_acc > best_val {
            best_val = val_acc;
            best_params = params.clone();
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= config.patience {
                break;
            }
        }
    }

    let logits = forward_logits(&best_params, ops, features)?;
    Ok(TrainResult {
        val_accuracy: if splits.val.is_empty() { 0.0 } else { best_val },
        test_accuracy: accuracy_on(&logits, labels, &splits.test),
        params: best_params,
        final_loss,
        epochs_run,
    })
}

/// The hyperparameter grid searched by `random_search`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpace {
    pub layers: Vec<usize>,
    pub hidden: Vec<usize>,
    pub learning_rates: Vec<f64>,
    pub dropouts: Vec<f64>,
    pub weight_decays: Vec<f64>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            layers: vec![2, 3],
            hidden: vec![32, 64],
            learning_rates: vec![0.001, 0.005, 0.01, 0.1],
            dropouts: vec![0.2, 0.4, 0.6, 0.8],
            weight_decays: vec![0.0001, 0.001, 0.01, 0.1],
        }
    }
}

/// One row of the search score table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreRow {
    pub config: TrainConfig,
    pub mean_val_accuracy: f64,
    pub std_val_accuracy: f64,
    /// Test accuracy of the repeat with the best validation accuracy.
    pub test_accuracy: f64,
}

/// Sample `n_configs` grid points uniformly, train each `n_repeats` times
/// with derived seeds, and pick the configuration with the highest mean
/// validation accuracy.
#[allow(clippy::too_many_arguments)]
pub fn random_search(
    kind: ModelKind,
    ops: &GraphOps,
    features: &Array2<f64>,
    labels: &[Option<usize>],
    splits: &SplitIndices,
    classes: usize,
    space: &SearchSpace,
    n_configs: usize,
    n_repeats: usize,
    max_epochs: usize,
    patience: usize,
    seed: u64,
) -> Result<(TrainConfig, Vec<ScoreRow>)> {
    if n_configs == 0 || n_repeats == 0 {
        return Err(MpnnError::Argument(
            "need at least one configuration and one repeat".into(),
        ));
    }
    let mut rng = derived_rng("mpnn-search", &kind.to_string(), seed);
    let mut rows = Vec::with_capacity(n_configs);

    for config_idx in 0..n_configs {
        let config = TrainConfig {
            layers: *space.layers.choose(&mut rng).expect("non-empty grid"),
            hidden: *space.hidden.choose(&mut rng).expect("non-empty grid"),
            learning_rate: *space.learning_rates.choose(&mut rng).expect("non-empty grid"),
            dropout: *space.dropouts.choose(&mut rng).expect("non-empty grid"),
            weight_decay: *space.weight_decays.choose(&mut rng).expect("non-empty grid"),
            max_epochs,
            patience,
            seed: 0,
        };

        let mut vals = Vec::with_capacity(n_repeats);
        let mut best: Option<(f64, f64)> = None; // (val, test)
        for repeat in 0..n_repeats {
            let run_seed = seed
                .wrapping_mul(1_000_003)
                .wrapping_add((config_idx * 131 + repeat) as u64);
            let run = train(
                kind,
                ops,
                features,
                labels,
                splits,
                classes,
                &TrainConfig {
                    seed: run_seed,
                    ..config
                },
            )?;
            if best.is_none_or(|(v, _)| run.val_accuracy > v) {
                best = Some((run.val_accuracy, run.test_accuracy));
            }
            vals.push(run.val_accuracy);
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let variance =
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        rows.push(ScoreRow {
            config,
            mean_val_accuracy: mean,
            std_val_accuracy: variance.sqrt(),
            test_accuracy: best.expect("at least one repeat").1,
        });
    }

    let winner = rows
        .iter()
        .max_by(|a, b| {
            a.mean_val_accuracy
                .partial_cmp(&b.mean_val_accuracy)
                .expect("finite accuracies")
        })
        .expect("at least one row")
        .config;
    Ok((winner, rows))
}
