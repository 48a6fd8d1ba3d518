use std::collections::HashSet;

use tagbench_core::{derived_rng, EgoGraph, HopCaps, NodeRecord, TextAttributedGraph};

use crate::{DropMode, DropSpec, PerturbError, Result};

/// Round half-up to an integer count. `p = 0.5` stays symmetric on even
/// totals and reproduces the worked drop example.
pub fn round_half_up(value: f64) -> usize {
    (value + 0.5).floor() as usize
}

fn same_label(node: &NodeRecord, target_label: usize) -> Option<bool> {
    node.label.map(|l| l == target_label)
}

/// Apply a neighbor drop/add perturbation.
///
/// Drop modes act jointly over all included neighbors (both hops); with `x`
/// same-label and `y` different-label neighbors and `b =
/// round_half_up((x + y) * p)`:
///
/// * `drop_random` removes `b` uniformly chosen neighbors,
/// * `drop_same` retains `max(x - b, 0)` same-label neighbors and all `y`
///   different-label ones,
/// * `drop_different` retains `max(y - b, 0)` different-label neighbors and
///   all `x` same-label ones.
///
/// Hop-2 nodes whose every included hop-1 neighbor was removed are removed
/// as well. Add modes build a fresh one-hop ego from the target's full
/// pre-cap neighborhood in `graph`, including `b` neighbors of the stated
/// class and stopping early when the class is exhausted. Deterministic under
/// `(ego.target, spec.seed)`.
pub fn perturb_neighbors(
    ego: &EgoGraph,
    spec: &DropSpec,
    graph: &TextAttributedGraph,
) -> Result<EgoGraph> {
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(PerturbError::Argument(format!(
            "drop percentage {} outside [0, 1]",
            spec.p
        )));
    }
    if spec.mode.is_add() {
        add_neighbors(ego, spec, graph)
    } else {
        drop_neighbors(ego, spec)
    }
}

fn drop_neighbors(ego: &EgoGraph, spec: &DropSpec) -> Result<EgoGraph> {
    let neighbors: Vec<&NodeRecord> = ego.neighbors().collect();
    let total = neighbors.len();
    let mut rng = derived_rng("perturb", &ego.target.id, spec.seed);

    let keep_positions: HashSet<usize> = if spec.mode == DropMode::DropRandom {
        let b = round_half_up(total as f64 * spec.p).min(total);
        let removed: HashSet<usize> = rand::seq::index::sample(&mut rng, total, b)
            .iter()
            .collect();
        (0..total).filter(|i| !removed.contains(i)).collect()
    } else {
        let target_label = ego.target.label.ok_or_else(|| {
            PerturbError::Data(format!("target {} has no label", ego.target.id))
        })?;
        let mut same = Vec::new();
        let mut different = Vec::new();
        for (i, n) in neighbors.iter().enumerate() {
            match same_label(n, target_label) {
                Some(true) => same.push(i),
                Some(false) => different.push(i),
                None => {
                    return Err(PerturbError::Data(format!(
                        "neighbor {} has no label under mode {}",
                        n.id, spec.mode
                    )))
                }
            }
        }
        let b = round_half_up(total as f64 * spec.p);
        let (shrink, keep_all) = match spec.mode {
            DropMode::DropSame => (&same, &different),
            DropMode::DropDifferent => (&different, &same),
            _ => unreachable!("drop_random handled above"),
        };
        let retain = shrink.len().saturating_sub(b);
        let survivors = rand::seq::index::sample(&mut rng, shrink.len(), retain);
        let mut keep: HashSet<usize> = survivors.iter().map(|i| shrink[i]).collect();
        keep.extend(keep_all.iter().copied());
        keep
    };

    let hop1: Vec<NodeRecord> = ego
        .hop1
        .iter()
        .enumerate()
        .filter(|(i, _)| keep_positions.contains(i))
        .map(|(_, n)| n.clone())
        .collect();
    let hop1_ids: HashSet<&str> = hop1.iter().map(|n| n.id.as_str()).collect();

    // cascade: a hop-2 node needs a surviving hop-1 neighbor to stay reachable
    let hop2: Vec<NodeRecord> = ego
        .hop2
        .iter()
        .enumerate()
        .filter(|(i, _)| keep_positions.contains(&(ego.hop1.len() + i)))
        .filter(|(_, n)| {
            ego.adjacent_ids(&n.id)
                .iter()
                .any(|adj| hop1_ids.contains(adj))
        })
        .map(|(_, n)| n.clone())
        .collect();

    let mut included: HashSet<&str> = HashSet::new();
    included.insert(ego.target.id.as_str());
    included.extend(hop1.iter().map(|n| n.id.as_str()));
    included.extend(hop2.iter().map(|n| n.id.as_str()));
    let intra_edges: Vec<(String, String)> = ego
        .intra_edges
        .iter()
        .filter(|(s, d)| included.contains(s.as_str()) && included.contains(d.as_str()))
        .cloned()
        .collect();

    Ok(EgoGraph {
        target: ego.target.clone(),
        hop1,
        hop2,
        intra_edges,
        caps: ego.caps,
        seed: ego.seed,
    })
}

fn add_neighbors(
    ego: &EgoGraph,
    spec: &DropSpec,
    graph: &TextAttributedGraph,
) -> Result<EgoGraph> {
    let target_idx = graph
        .node_index(&ego.target.id)
        .ok_or_else(|| PerturbError::Data(format!("target {} not in graph", ego.target.id)))?;
    let pool: Vec<&NodeRecord> = graph
        .neighbors(target_idx)
        .iter()
        .map(|&i| graph.node_by_index(i))
        .collect();
    let total = pool.len();
    let b = round_half_up(total as f64 * spec.p).min(total);

    let candidates: Vec<usize> = if spec.mode == DropMode::AddRandom {
        (0..total).collect()
    } else {
        let target_label = ego.target.label.ok_or_else(|| {
            PerturbError::Data(format!("target {} has no label", ego.target.id))
        })?;
        let want_same = spec.mode == DropMode::AddSame;
        let mut out = Vec::new();
        for (i, n) in pool.iter().enumerate() {
            match same_label(n, target_label) {
                Some(is_same) => {
                    if is_same == want_same {
                        out.push(i);
                    }
                }
                None => {
                    return Err(PerturbError::Data(format!(
                        "neighbor {} has no label under mode {}",
                        n.id, spec.mode
                    )))
                }
            }
        }
        out
    };

    // include b of the stated class; when the class is exhausted, stop
    let take = b.min(candidates.len());
    let mut rng = derived_rng("perturb", &ego.target.id, spec.seed);
    let chosen = rand::seq::index::sample(&mut rng, candidates.len(), take);
    let hop1: Vec<NodeRecord> = chosen
        .iter()
        .map(|i| pool[candidates[i]].clone())
        .collect();

    let mut included: HashSet<&str> = HashSet::new();
    included.insert(ego.target.id.as_str());
    included.extend(hop1.iter().map(|n| n.id.as_str()));
    let intra_edges: Vec<(String, String)> = graph
        .edge_ids()
        .filter(|(s, d)| included.contains(s) && included.contains(d))
        .map(|(s, d)| (s.to_string(), d.to_string()))
        .collect();

    Ok(EgoGraph {
        target: ego.target.clone(),
        hop1,
        hop2: Vec::new(),
        intra_edges,
        caps: HopCaps::new(ego.caps.hop1_max.max(take), ego.caps.hop2_max),
        seed: ego.seed,
    })
}
