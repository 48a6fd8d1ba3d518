use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{GraphOps, MpnnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gcn,
    Sage,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Gcn => "gcn",
            ModelKind::Sage => "sage",
        })
    }
}

/// Per-layer weight matrices. SAGE carries a second (neighbor) matrix per
/// layer; neither architecture uses biases.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub weights: Vec<Array2<f64>>,
    pub neighbor_weights: Vec<Array2<f64>>,
}

fn layer_dims(d_in: usize, hidden: usize, layers: usize, classes: usize) -> Vec<(usize, usize)> {
    (0..layers)
        .map(|l| {
            let rows = if l == 0 { d_in } else { hidden };
            let cols = if l == layers - 1 { classes } else { hidden };
            (rows, cols)
        })
        .collect()
}

fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-bound..bound))
}

impl ModelParams {
    pub fn init(
        kind: ModelKind,
        d_in: usize,
        hidden: usize,
        layers: usize,
        classes: usize,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if !(2..=3).contains(&layers) {
            return Err(MpnnError::Argument(format!(
                "layer count must be 2 or 3, got {layers}"
            )));
        }
        let dims = layer_dims(d_in, hidden, layers, classes);
        let weights: Vec<Array2<f64>> =
            dims.iter().map(|&(r, c)| glorot(r, c, rng)).collect();
        let neighbor_weights = match kind {
            ModelKind::Gcn => Vec::new(),
            ModelKind::Sage => dims.iter().map(|&(r, c)| glorot(r, c, rng)).collect(),
        };
        Ok(Self {
            kind,
            weights,
            neighbor_weights,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.weights.len()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            kind: self.kind,
            weights: self
                .weights
                .iter()
                .map(|w| Array2::zeros(w.raw_dim()))
                .collect(),
            neighbor_weights: self
                .neighbor_weights
                .iter()
                .map(|w| Array2::zeros(w.raw_dim()))
                .collect(),
        }
    }

    /// All parameter matrices, self weights first.
    pub fn matrices(&self) -> impl Iterator<Item = &Array2<f64>> {
        self.weights.iter().chain(self.neighbor_weights.iter())
    }

    pub fn matrices_mut(&mut self) -> impl Iterator<Item = &mut Array2<f64>> {
        self.weights
            .iter_mut()
            .chain(self.neighbor_weights.iter_mut())
    }
}

fn relu(z: &Array2<f64>) -> Array2<f64> {
    z.mapv(|v| v.max(0.0))
}

struct ForwardCache {
    /// dropout-applied layer inputs X_l
    inputs: Vec<Array2<f64>>,
    /// aggregated inputs: GCN `A_hat X_l`, SAGE `M X_l`
    aggregated: Vec<Array2<f64>>,
    /// pre-activations Z_l
    pre_activations: Vec<Array2<f64>>,
    /// inverted dropout masks (None when dropout is off)
    masks: Vec<Option<Array2<f64>>>,
}

fn forward_full(
    params: &ModelParams,
    ops: &GraphOps,
    features: &Array2<f64>,
    mut dropout: Option<(f64, &mut dyn rand::RngCore)>,
) -> Result<(Array2<f64>, ForwardCache)> {
    if features.nrows() != ops.node_count() {
        return Err(MpnnError::Shape(format!(
            "{} feature rows for {} nodes",
            features.nrows(),
            ops.node_count()
        )));
    }
    if features.ncols() != params.weights[0].nrows() {
        return Err(MpnnError::Shape(format!(
            "feature dim {} does not match first layer input {}",
            features.ncols(),
            params.weights[0].nrows()
        )));
    }

    let layers = params.layer_count();
    let mut cache = ForwardCache {
        inputs: Vec::with_capacity(layers),
        aggregated: Vec::with_capacity(layers),
        pre_activations: Vec::with_capacity(layers),
        masks: Vec::with_capacity(layers),
    };

    let mut h = features.clone();
    for l in 0..layers {
        let (x, mask) = match dropout.as_mut() {
            Some((p, rng)) if *p > 0.0 => {
                let keep = 1.0 - *p;
                let mask =
                    Array2::from_shape_fn(h.raw_dim(), |_| {
                        if rng.random_range(0.0..1.0) < keep {
                            1.0 / keep
                        } else {
                            0.0
                        }
                    });
                (&h * &mask, Some(mask))
            }
            _ => (h.clone(), None),
        };
        let z = match params.kind {
            ModelKind::Gcn => {
                let ax = ops.apply_norm(&x);
                let z = ax.dot(&params.weights[l]);
                cache.aggregated.push(ax);
                z
            }
            ModelKind::Sage => {
                let mx = ops.apply_mean(&x);
                let z = x.dot(&params.weights[l]) + mx.dot(&params.neighbor_weights[l]);
                cache.aggregated.push(mx);
                z
            }
        };
        cache.inputs.push(x);
        cache.masks.push(mask);
        h = if l + 1 == layers { z.clone() } else { relu(&z) };
        cache.pre_activations.push(z);
    }
    Ok((h, cache))
}

/// Logits with dropout off.
pub fn forward_logits(
    params: &ModelParams,
    ops: &GraphOps,
    features: &Array2<f64>,
) -> Result<Array2<f64>> {
    forward_full(params, ops, features, None).map(|(logits, _)| logits)
}

fn log_softmax_row(row: &[f64]) -> Vec<f64> {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
    row.iter().map(|v| v - log_sum).collect()
}

/// Cross-entropy over the training rows plus an L2 penalty
/// `(weight_decay / 2) * sum ||W||^2`, with its analytic gradients.
///
/// Training-mode dropout is applied when a `(rate, rng)` pair is given;
/// gradient checking runs with dropout off.
pub fn loss_and_gradients(
    params: &ModelParams,
    ops: &GraphOps,
    features: &Array2<f64>,
    labels: &[Option<usize>],
    train_idx: &[usize],
    weight_decay: f64,
    dropout: Option<(f64, &mut dyn rand::RngCore)>,
) -> Result<(f64, ModelParams, Array2<f64>)> {
    if train_idx.is_empty() {
        return Err(MpnnError::Argument("empty training split".into()));
    }
    let (logits, cache) = forward_full(params, ops, features, dropout)?;
    let classes = logits.ncols();
    let layers = params.layer_count();
    let scale = 1.0 / train_idx.len() as f64;

    let mut loss = 0.0;
    let mut grad_z = Array2::<f64>::zeros(logits.raw_dim());
    for &v in train_idx {
        let label = labels[v].ok_or_else(|| {
            MpnnError::Argument(format!("training node {v} has no label"))
        })?;
        if label >= classes {
            return Err(MpnnError::Shape(format!(
                "label {label} outside {classes} classes"
            )));
        }
        let row: Vec<f64> = logits.row(v).to_vec();
        let log_probs = log_softmax_row(&row);
        loss -= scale * log_probs[label];
        for c in 0..classes {
            grad_z[(v, c)] = scale * (log_probs[c].exp() - f64::from(u8::from(c == label)));
        }
    }
    for w in params.matrices() {
        loss += 0.5 * weight_decay * w.iter().map(|v| v * v).sum::<f64>();
    }

    let mut grads = params.zeros_like();
    let mut g = grad_z;
    for l in (0..layers).rev() {
        match params.kind {
            ModelKind::Gcn => {
                grads.weights[l] =
                    cache.aggregated[l].t().dot(&g) + &(weight_decay * &params.weights[l]);
                if l > 0 {
                    let d_agg = g.dot(&params.weights[l].t());
                    let mut dh = ops.apply_norm(&d_agg); // A_hat is symmetric
                    if let Some(mask) = &cache.masks[l] {
                        dh *= mask;
                    }
                    let relu_gate = cache.pre_activations[l - 1].mapv(|v| f64::from(v > 0.0));
                    g = dh * relu_gate;
                }
            }
            ModelKind::Sage => {
                grads.weights[l] =
                    cache.inputs[l].t().dot(&g) + &(weight_decay * &params.weights[l]);
                grads.neighbor_weights[l] = cache.aggregated[l].t().dot(&g)
                    + &(weight_decay * &params.neighbor_weights[l]);
                if l > 0 {
                    let d_self = g.dot(&params.weights[l].t());
                    let d_neigh = ops.apply_mean_transpose(&g.dot(&params.neighbor_weights[l].t()));
                    let mut dh = d_self + d_neigh;
                    if let Some(mask) = &cache.masks[l] {
                        dh *= mask;
                    }
                    let relu_gate = cache.pre_activations[l - 1].mapv(|v| f64::from(v > 0.0));
                    g = dh * relu_gate;
                }
            }
        }
    }

    Ok((loss, grads, logits))
}

/// Row-wise argmax.
pub fn predictions(logits: &Array2<f64>) -> Vec<usize> {
    logits
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite logits"))
                .map(|(i, _)| i)
                .unwrap_or(0)
        })
        .collect()
}

/// Accuracy of the argmax predictions over the given node indices.
pub fn accuracy_on(logits: &Array2<f64>, labels: &[Option<usize>], idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let preds = predictions(logits);
    let correct = idx
        .iter()
        .filter(|&&v| labels[v].is_some_and(|l| l == preds[v]))
        .count();
    correct as f64 / idx.len() as f64
}
