use rand::seq::SliceRandom;
use rand::Rng;
use tagbench_core::{derived_rng, EgoGraph};

use crate::{PerturbError, Result, RewireKind};

/// What happens to hop-2 nodes under the path strategy. The caption behind
/// the strategy only specifies the hop-1 chain; keeping each hop-2 node on
/// its original parent is the minimal surgery, dropping them entirely is
/// exposed as the alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathHop2 {
    #[default]
    KeepParent,
    Drop,
}

fn is_between(edge: &(String, String), a: &str, b: &str) -> bool {
    (edge.0 == a && edge.1 == b) || (edge.0 == b && edge.1 == a)
}

/// Rewire an ego-graph. Node sets are unchanged (except hop-2 under
/// `PathHop2::Drop`); only `intra_edges` is rebuilt. Deterministic under
/// `(ego.target, seed)`.
pub fn rewire(ego: &EgoGraph, strategy: RewireKind, seed: u64) -> Result<EgoGraph> {
    rewire_with_options(ego, strategy, seed, PathHop2::KeepParent)
}

pub fn rewire_with_options(
    ego: &EgoGraph,
    strategy: RewireKind,
    seed: u64,
    path_hop2: PathHop2,
) -> Result<EgoGraph> {
    if ego.hop1.is_empty() && !ego.hop2.is_empty() {
        return Err(PerturbError::InvariantViolation(
            "hop-2 nodes present without any hop-1 node".into(),
        ));
    }
    let mut rng = derived_rng("rewire", &ego.target.id, seed);
    let target = ego.target.id.as_str();

    // Original target<->hop-1 edges, in original order and direction.
    let target_hop1_edges: Vec<(String, String)> = ego
        .intra_edges
        .iter()
        .filter(|e| ego.hop1.iter().any(|h| is_between(e, target, &h.id)))
        .cloned()
        .collect();

    let mut edges: Vec<(String, String)> = Vec::new();
    let mut hop2 = ego.hop2.clone();

    match strategy {
        RewireKind::Random | RewireKind::Extreme => {
            edges.extend(target_hop1_edges);
            let fixed_parent = if strategy == RewireKind::Extreme && !ego.hop2.is_empty() {
                Some(rng.random_range(0..ego.hop1.len()))
            } else {
                None
            };
            for h2 in &ego.hop2 {
                let parent = match fixed_parent {
                    Some(p) => p,
                    None => rng.random_range(0..ego.hop1.len()),
                };
                edges.push((ego.hop1[parent].id.clone(), h2.id.clone()));
            }
        }
        RewireKind::Path => {
            let mut order: Vec<usize> = (0..ego.hop1.len()).collect();
            order.shuffle(&mut rng);
            if let Some(&head) = order.first() {
                let head_id = ego.hop1[head].id.as_str();
                // keep the original direction of the target-head edge
                let original = ego
                    .intra_edges
                    .iter()
                    .find(|e| is_between(e, target, head_id));
                edges.push(match original {
                    Some(e) => e.clone(),
                    None => (target.to_string(), head_id.to_string()),
                });
            }
            for pair in order.windows(2) {
                edges.push((
                    ego.hop1[pair[0]].id.clone(),
                    ego.hop1[pair[1]].id.clone(),
                ));
            }
            match path_hop2 {
                PathHop2::Drop => hop2.clear(),
                PathHop2::KeepParent => {
                    for h2 in &ego.hop2 {
                        // first hop-1 parent in enumeration order
                        let parent = ego
                            .hop1
                            .iter()
                            .find(|h1| {
                                ego.intra_edges.iter().any(|e| is_between(e, &h1.id, &h2.id))
                            })
                            .map(|h1| h1.id.as_str());
                        if let Some(parent) = parent {
                            let original = ego
                                .intra_edges
                                .iter()
                                .find(|e| is_between(e, parent, &h2.id))
                                .expect("parent chosen from intra edges");
                            edges.push(original.clone());
                        }
                    }
                }
            }
        }
    }

    Ok(EgoGraph {
        target: ego.target.clone(),
        hop1: ego.hop1.clone(),
        hop2,
        intra_edges: edges,
        caps: ego.caps,
        seed: ego.seed,
    })
}
