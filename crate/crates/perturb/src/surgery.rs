use std::collections::HashSet;

use tagbench_core::{EgoGraph, TextAttributedGraph};

/// Lift an ego-local rewiring to the global edge list for message-passing
/// baselines: the original ego's internal edges are removed and the rewired
/// ego's edges take their place. All other edges are untouched.
pub fn apply_rewired_ego(
    graph: &TextAttributedGraph,
    original: &EgoGraph,
    rewired: &EgoGraph,
) -> Vec<(String, String)> {
    let removed: HashSet<(&str, &str)> = original
        .intra_edges
        .iter()
        .map(|(s, d)| (s.as_str(), d.as_str()))
        .collect();
    let mut edges: Vec<(String, String)> = graph
        .edge_ids()
        .filter(|(s, d)| !removed.contains(&(*s, *d)))
        .map(|(s, d)| (s.to_string(), d.to_string()))
        .collect();
    edges.extend(rewired.intra_edges.iter().cloned());
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rewire, RewireKind};
    use tagbench_core::{extract_ego_graph, synth, HopCaps};

    #[test]
    fn surgery_swaps_exactly_the_ego_edges() {
        let graph = synth::keyword_graph(&synth::KeywordGraphConfig {
            n_nodes: 40,
            n_labels: 2,
            degree: 4,
            homophily: (0.5, 0.9),
            junk_tokens: 0,
            seed: 3,
        });
        let target = &graph.nodes()[0].id;
        let ego = extract_ego_graph(&graph, target, HopCaps::new(5, 3), 1).unwrap();
        let rewired = rewire(&ego, RewireKind::Path, 2).unwrap();
        let edges = apply_rewired_ego(&graph, &ego, &rewired);

        let global: HashSet<(String, String)> = graph
            .edge_ids()
            .map(|(s, d)| (s.to_string(), d.to_string()))
            .collect();
        let swapped: HashSet<(String, String)> = edges.iter().cloned().collect();
        // edges outside the ego unchanged
        for e in &global {
            let inside = ego.intra_edges.contains(e);
            assert_eq!(swapped.contains(e) || inside, true);
            if !inside {
                assert!(swapped.contains(e));
            }
        }
        // rewired ego edges present
        for e in &rewired.intra_edges {
            assert!(swapped.contains(e));
        }
    }
}
