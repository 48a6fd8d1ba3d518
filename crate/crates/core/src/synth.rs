//! Seeded synthetic graph generators for tests and benchmark experiments.
//!
//! The keyword family builds labeled graphs whose node titles contain a
//! keyword tied to the node's label, with per-node homophily drawn from a
//! configurable range. Deterministic oracles over such graphs reproduce the
//! directional effects of neighbor perturbations without any model weights.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::{derived_rng, NodeRecord, Split, TextAttributedGraph};

/// Small builder for hand-written test graphs. Titles default to
/// `"paper <id>"`.
pub fn graph_from_parts(
    nodes: &[(&str, Option<usize>)],
    edges: &[(&str, &str)],
    vocab: &[&str],
) -> TextAttributedGraph {
    let records = nodes
        .iter()
        .map(|(id, label)| NodeRecord {
            id: id.to_string(),
            title: format!("paper {id}"),
            body: None,
            label: *label,
            year: None,
            split: Split::None,
        })
        .collect();
    let edge_list = edges
        .iter()
        .map(|(s, d)| (s.to_string(), d.to_string()))
        .collect();
    let vocab = vocab.iter().map(|s| s.to_string()).collect();
    TextAttributedGraph::new(records, edge_list, vocab).unwrap().0
}

/// A directed chain `n0 -> n1 -> ... -> n{k-1}`, all nodes labeled 0.
pub fn chain_graph(len: usize) -> TextAttributedGraph {
    let nodes: Vec<(String, Option<usize>)> =
        (0..len).map(|i| (format!("n{i:02}"), Some(0))).collect();
    let node_refs: Vec<(&str, Option<usize>)> =
        nodes.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let edges: Vec<(String, String)> = (1..len)
        .map(|i| (format!("n{:02}", i - 1), format!("n{i:02}")))
        .collect();
    let edge_refs: Vec<(&str, &str)> =
        edges.iter().map(|(s, d)| (s.as_str(), d.as_str())).collect();
    graph_from_parts(&node_refs, &edge_refs, &["L0"])
}

/// A star: `hub` cites `s00..s{n-1}`, all labeled 0.
pub fn star_graph(spokes: usize) -> TextAttributedGraph {
    let mut nodes = vec![("hub".to_string(), Some(0))];
    let mut edges = Vec::new();
    for i in 0..spokes {
        nodes.push((format!("s{i:02}"), Some(0)));
        edges.push(("hub".to_string(), format!("s{i:02}")));
    }
    let node_refs: Vec<(&str, Option<usize>)> =
        nodes.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let edge_refs: Vec<(&str, &str)> =
        edges.iter().map(|(s, d)| (s.as_str(), d.as_str())).collect();
    graph_from_parts(&node_refs, &edge_refs, &["L0"])
}

const KEYWORDS: &[&str] = &[
    "alkanes", "boranes", "cyclones", "dynamos", "estuaries", "ferrites", "glaciers", "hadrons",
];

/// Keyword associated with a label index of a [`keyword_graph`].
pub fn label_keyword(label: usize) -> &'static str {
    KEYWORDS[label % KEYWORDS.len()]
}

/// Configuration for [`keyword_graph`].
#[derive(Debug, Clone)]
pub struct KeywordGraphConfig {
    pub n_nodes: usize,
    pub n_labels: usize,
    /// Out-edges drawn per node.
    pub degree: usize,
    /// Per-node probability of picking a same-label partner, drawn uniformly
    /// from this range.
    pub homophily: (f64, f64),
    /// Uninformative filler tokens appended to each title; dilutes the
    /// label keyword so aggregate (neighbor) signal matters more.
    pub junk_tokens: usize,
    pub seed: u64,
}

impl Default for KeywordGraphConfig {
    fn default() -> Self {
        Self {
            n_nodes: 200,
            n_labels: 4,
            degree: 8,
            homophily: (0.2, 0.9),
            junk_tokens: 0,
            seed: 0,
        }
    }
}

/// Generate a labeled graph whose titles carry one label keyword each.
///
/// Label vocabulary is `topic-<keyword>`; node `k` gets label `k %
/// n_labels`, so classes are balanced. Every node has a label and a year of
/// 2023, making any split scheme applicable.
pub fn keyword_graph(cfg: &KeywordGraphConfig) -> TextAttributedGraph {
    assert!(cfg.n_labels >= 2 && cfg.n_labels <= KEYWORDS.len());
    assert!(cfg.n_nodes >= 2 * cfg.n_labels);
    let mut rng = derived_rng("synth-keyword", "", cfg.seed);

    let labels: Vec<usize> = (0..cfg.n_nodes).map(|i| i % cfg.n_labels).collect();
    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); cfg.n_labels];
    for (i, &l) in labels.iter().enumerate() {
        by_label[l].push(i);
    }

    let mut nodes = Vec::with_capacity(cfg.n_nodes);
    for (i, &l) in labels.iter().enumerate() {
        let mut title = format!("{} notes", label_keyword(l));
        for j in 0..cfg.junk_tokens {
            title.push_str(&format!(" flib{i:03}x{j}"));
        }
        nodes.push(NodeRecord {
            id: format!("k{i:03}"),
            title,
            body: None,
            label: Some(l),
            year: Some(2023),
            split: Split::None,
        });
    }

    let mut edges = Vec::new();
    for i in 0..cfg.n_nodes {
        let h = rng.random_range(cfg.homophily.0..=cfg.homophily.1);
        for _ in 0..cfg.degree {
            let same = rng.random_bool(h);
            let pool = if same {
                &by_label[labels[i]]
            } else {
                // pick a different label class first, then a member
                let mut l = rng.random_range(0..cfg.n_labels);
                if l == labels[i] {
                    l = (l + 1) % cfg.n_labels;
                }
                &by_label[l]
            };
            let partner = *pool.choose(&mut rng).unwrap();
            if partner != i {
                edges.push((nodes[i].id.clone(), nodes[partner].id.clone()));
            }
        }
    }

    let vocab: Vec<String> = (0..cfg.n_labels)
        .map(|l| format!("topic-{}", label_keyword(l)))
        .collect();
    TextAttributedGraph::new(nodes, edges, vocab).unwrap().0
}
