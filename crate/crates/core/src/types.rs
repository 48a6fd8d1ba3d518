use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Split membership of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
    #[default]
    None,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::None => "none",
        };
        f.write_str(s)
    }
}

/// One node of a text-attributed graph.
///
/// `label` is an index into the owning graph's label vocabulary. Test nodes
/// must carry a label; this is enforced when a split assignment is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub title: String,
    pub body: Option<String>,
    pub label: Option<usize>,
    pub year: Option<i32>,
    #[serde(default)]
    pub split: Split,
}

/// A directed graph whose nodes carry text attributes.
///
/// Nodes are stored in insertion order; iteration over nodes and edges is
/// deterministic. The undirected adjacency (union of in- and out-edges) is
/// precomputed since neighborhood queries treat citation direction as
/// irrelevant.
#[derive(Debug, Clone)]
pub struct TextAttributedGraph {
    nodes: Vec<NodeRecord>,
    id_index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    undirected_adj: Vec<Vec<usize>>,
    label_vocab: Vec<String>,
}

impl TextAttributedGraph {
    /// Build a validated graph from node records and id-level edges.
    ///
    /// Self-loops and duplicate directed edges are dropped; the counts are
    /// returned alongside the graph. Dangling edge endpoints, empty titles,
    /// duplicate ids and out-of-range label indices are schema errors.
    pub fn new(
        nodes: Vec<NodeRecord>,
        edges: Vec<(String, String)>,
        label_vocab: Vec<String>,
    ) -> Result<(Self, crate::LoadStats)> {
        let mut id_index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.title.is_empty() {
                return Err(CoreError::Schema(format!("node {} has empty title", node.id)));
            }
            if let Some(l) = node.label {
                if l >= label_vocab.len() {
                    return Err(CoreError::Schema(format!(
                        "node {} label index {} out of range for vocab of {}",
                        node.id,
                        l,
                        label_vocab.len()
                    )));
                }
            }
            if id_index.insert(node.id.clone(), i).is_some() {
                return Err(CoreError::Schema(format!("duplicate node id: {}", node.id)));
            }
        }

        let mut stats = crate::LoadStats::default();
        let mut seen = std::collections::HashSet::new();
        let mut index_edges = Vec::with_capacity(edges.len());
        for (src, dst) in &edges {
            let si = *id_index
                .get(src)
                .ok_or_else(|| CoreError::Schema(format!("edge endpoint not a node: {src}")))?;
            let di = *id_index
                .get(dst)
                .ok_or_else(|| CoreError::Schema(format!("edge endpoint not a node: {dst}")))?;
            if si == di {
                stats.self_loops_removed += 1;
                continue;
            }
            if !seen.insert((si, di)) {
                stats.duplicate_edges_removed += 1;
                continue;
            }
            index_edges.push((si, di));
        }

        let mut undirected_adj = vec![Vec::new(); nodes.len()];
        for &(s, d) in &index_edges {
            undirected_adj[s].push(d);
            undirected_adj[d].push(s);
        }
        for adj in &mut undirected_adj {
            adj.sort_unstable();
            adj.dedup();
        }

        Ok((
            Self {
                nodes,
                id_index,
                edges: index_edges,
                undirected_adj,
                label_vocab,
            },
            stats,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn label_vocab(&self) -> &[String] {
        &self.label_vocab
    }

    pub fn label_name(&self, index: usize) -> Option<&str> {
        self.label_vocab.get(index).map(|s| s.as_str())
    }

    pub fn node(&self, id: &str) -> Option<&NodeRecord> {
        self.id_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.id_index.get(id).copied()
    }

    pub fn node_by_index(&self, index: usize) -> &NodeRecord {
        &self.nodes[index]
    }

    /// Directed edges as node indices, in load order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Directed edges as id pairs, in load order.
    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(move |&(s, d)| (self.nodes[s].id.as_str(), self.nodes[d].id.as_str()))
    }

    /// Sorted undirected neighborhood of a node (in- and out-edges).
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.undirected_adj[index]
    }

    /// Stamp split tags onto nodes. Ids absent from the assignment become
    /// [`Split::None`]. Errors if a test node lacks a label.
    pub fn apply_split(&mut self, assignment: &crate::SplitAssignment) -> Result<()> {
        for node in &mut self.nodes {
            let split = assignment.get(&node.id);
            if split == Split::Test && node.label.is_none() {
                return Err(CoreError::Schema(format!(
                    "test node {} has no label",
                    node.id
                )));
            }
            node.split = split;
        }
        Ok(())
    }
}
