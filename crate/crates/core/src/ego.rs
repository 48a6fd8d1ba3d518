use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{derived_rng, CoreError, NodeRecord, Result, TextAttributedGraph};

/// Per-hop neighbor caps for ego extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopCaps {
    pub hop1_max: usize,
    pub hop2_max: usize,
}

impl HopCaps {
    pub fn new(hop1_max: usize, hop2_max: usize) -> Self {
        Self { hop1_max, hop2_max }
    }
}

/// A target node with its sampled, capped 1-hop and 2-hop neighborhoods and
/// the original edges among the included nodes.
///
/// Hop lists are in sampling order; prompt enumeration numbers hop-1 nodes
/// before hop-2 nodes, in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoGraph {
    pub target: NodeRecord,
    pub hop1: Vec<NodeRecord>,
    pub hop2: Vec<NodeRecord>,
    pub intra_edges: Vec<(String, String)>,
    pub caps: HopCaps,
    pub seed: u64,
}

impl EgoGraph {
    /// Included neighbors, hop 1 first, in enumeration order.
    pub fn neighbors(&self) -> impl Iterator<Item = &NodeRecord> {
        self.hop1.iter().chain(self.hop2.iter())
    }

    pub fn neighbor_count(&self) -> usize {
        self.hop1.len() + self.hop2.len()
    }

    /// 1-based enumeration number of an included neighbor, as used in
    /// rendered prompts.
    pub fn enumeration_number(&self, id: &str) -> Option<usize> {
        self.neighbors().position(|n| n.id == id).map(|p| p + 1)
    }

    /// Ids adjacent to `id` via the included edges, either direction.
    pub fn adjacent_ids(&self, id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        for (s, d) in &self.intra_edges {
            if s == id {
                out.push(d.as_str());
            } else if d == id {
                out.push(s.as_str());
            }
        }
        out
    }

    /// Check the structural invariants that every well-formed ego satisfies.
    pub fn check_invariants(&self) -> Result<()> {
        if self.hop1.len() > self.caps.hop1_max || self.hop2.len() > self.caps.hop2_max {
            return Err(CoreError::Schema("hop size exceeds cap".into()));
        }
        let hop1_ids: HashSet<&str> = self.hop1.iter().map(|n| n.id.as_str()).collect();
        let hop2_ids: HashSet<&str> = self.hop2.iter().map(|n| n.id.as_str()).collect();
        if hop1_ids.contains(self.target.id.as_str()) || hop2_ids.contains(self.target.id.as_str())
        {
            return Err(CoreError::Schema("target appears in a hop list".into()));
        }
        if hop1_ids.intersection(&hop2_ids).next().is_some() {
            return Err(CoreError::Schema("hop lists are not disjoint".into()));
        }
        for hop2 in &self.hop2 {
            let reachable = self
                .adjacent_ids(&hop2.id)
                .iter()
                .any(|adj| hop1_ids.contains(adj));
            if !reachable {
                return Err(CoreError::Schema(format!(
                    "hop-2 node {} has no hop-1 neighbor",
                    hop2.id
                )));
            }
        }
        Ok(())
    }
}

/// Extract the capped ego-graph around `target`.
///
/// Neighborhoods are undirected (in- and out-edges both count). Hop-1 nodes
/// are a seeded uniform sample without replacement of the target's
/// neighborhood; hop-2 candidates come only from the sampled hop-1 nodes'
/// neighborhoods, excluding the target and hop-1 set. `intra_edges` holds
/// exactly the original directed edges among the included nodes, in graph
/// edge order. The sampler stream is derived from the target id and the
/// seed, so extraction is a pure function of its arguments.
pub fn extract_ego_graph(
    graph: &TextAttributedGraph,
    target: &str,
    caps: HopCaps,
    seed: u64,
) -> Result<EgoGraph> {
    let target_idx = graph
        .node_index(target)
        .ok_or_else(|| CoreError::UnknownNode(target.to_string()))?;
    let mut rng = derived_rng("ego", target, seed);

    let hop1_pool = graph.neighbors(target_idx);
    let k1 = caps.hop1_max.min(hop1_pool.len());
    let hop1_idx: Vec<usize> = rand::seq::index::sample(&mut rng, hop1_pool.len(), k1)
        .iter()
        .map(|i| hop1_pool[i])
        .collect();

    let hop1_set: HashSet<usize> = hop1_idx.iter().copied().collect();
    let mut hop2_pool = Vec::new();
    let mut seen = HashSet::new();
    for &h1 in &hop1_idx {
        for &cand in graph.neighbors(h1) {
            if cand != target_idx && !hop1_set.contains(&cand) && seen.insert(cand) {
                hop2_pool.push(cand);
            }
        }
    }
    let k2 = caps.hop2_max.min(hop2_pool.len());
    let hop2_idx: Vec<usize> = rand::seq::index::sample(&mut rng, hop2_pool.len(), k2)
        .iter()
        .map(|i| hop2_pool[i])
        .collect();

    let mut included: HashSet<usize> = HashSet::new();
    included.insert(target_idx);
    included.extend(&hop1_idx);
    included.extend(&hop2_idx);
    let intra_edges = graph
        .edges()
        .iter()
        .filter(|(s, d)| included.contains(s) && included.contains(d))
        .map(|&(s, d)| {
            (
                graph.node_by_index(s).id.clone(),
                graph.node_by_index(d).id.clone(),
            )
        })
        .collect();

    Ok(EgoGraph {
        target: graph.node_by_index(target_idx).clone(),
        hop1: hop1_idx
            .iter()
            .map(|&i| graph.node_by_index(i).clone())
            .collect(),
        hop2: hop2_idx
            .iter()
            .map(|&i| graph.node_by_index(i).clone())
            .collect(),
        intra_edges,
        caps,
        seed,
    })
}

/// Fraction of labeled included neighbors (both hops) sharing the target's
/// label.
///
/// Unlabeled neighbors are excluded from numerator and denominator. Errors
/// when the target is unlabeled or no included neighbor carries a label;
/// callers exclude such nodes from correlation analyses.
pub fn local_homophily_ratio(ego: &EgoGraph) -> Result<f64> {
    let target_label = ego.target.label.ok_or_else(|| {
        CoreError::UndefinedHomophily(format!("target {} has no label", ego.target.id))
    })?;
    let mut labeled = 0usize;
    let mut same = 0usize;
    for neighbor in ego.neighbors() {
        if let Some(l) = neighbor.label {
            labeled += 1;
            if l == target_label {
                same += 1;
            }
        }
    }
    if labeled == 0 {
        return Err(CoreError::UndefinedHomophily(format!(
            "no labeled neighbors around {}",
            ego.target.id
        )));
    }
    Ok(same as f64 / labeled as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn isolated_target_yields_empty_hops() {
        let graph = synth::graph_from_parts(
            &[("t", Some(0)), ("a", Some(0))],
            &[],
            &["L0"],
        );
        let ego = extract_ego_graph(&graph, "t", HopCaps::new(20, 5), 0).unwrap();
        assert!(ego.hop1.is_empty());
        assert!(ego.hop2.is_empty());
        assert!(ego.intra_edges.is_empty());
    }

    #[test]
    fn chain_is_forced() {
        let graph = synth::graph_from_parts(
            &[("t", Some(0)), ("a", Some(0)), ("b", Some(0))],
            &[("t", "a"), ("a", "b")],
            &["L0"],
        );
        let ego = extract_ego_graph(&graph, "t", HopCaps::new(20, 5), 123).unwrap();
        assert_eq!(ego.hop1.len(), 1);
        assert_eq!(ego.hop1[0].id, "a");
        assert_eq!(ego.hop2.len(), 1);
        assert_eq!(ego.hop2[0].id, "b");
        assert_eq!(
            ego.intra_edges,
            vec![("t".into(), "a".into()), ("a".into(), "b".into())]
        );
        ego.check_invariants().unwrap();
    }

    #[test]
    fn extraction_is_pure() {
        let graph = synth::star_graph(25);
        let a = extract_ego_graph(&graph, "hub", HopCaps::new(20, 5), 7).unwrap();
        let b = extract_ego_graph(&graph, "hub", HopCaps::new(20, 5), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hop1.len(), 20);
    }

    #[test]
    fn homophily_worked_example() {
        // 10 neighbors, 6 sharing the target label.
        let mut nodes = vec![("t".to_string(), Some(0))];
        let mut edges = Vec::new();
        for i in 0..10 {
            let label = if i < 6 { Some(0) } else { Some(1) };
            nodes.push((format!("n{i}"), label));
            edges.push(("t".to_string(), format!("n{i}")));
        }
        let node_refs: Vec<(&str, Option<usize>)> =
            nodes.iter().map(|(id, l)| (id.as_str(), *l)).collect();
        let edge_refs: Vec<(&str, &str)> =
            edges.iter().map(|(s, d)| (s.as_str(), d.as_str())).collect();
        let graph = synth::graph_from_parts(&node_refs, &edge_refs, &["L0", "L1"]);
        let ego = extract_ego_graph(&graph, "t", HopCaps::new(20, 5), 0).unwrap();
        let ratio = local_homophily_ratio(&ego).unwrap();
        assert!((ratio - 0.6).abs() < 1e-12);
    }

    #[test]
    fn homophily_requires_labeled_neighbors() {
        let graph = synth::graph_from_parts(
            &[("t", Some(0)), ("a", None)],
            &[("t", "a")],
            &["L0"],
        );
        let ego = extract_ego_graph(&graph, "t", HopCaps::new(20, 5), 0).unwrap();
        assert!(local_homophily_ratio(&ego).is_err());
    }

    #[test]
    fn unknown_target_is_an_error() {
        let graph = synth::star_graph(3);
        assert!(extract_ego_graph(&graph, "nope", HopCaps::new(5, 5), 0).is_err());
    }
}
