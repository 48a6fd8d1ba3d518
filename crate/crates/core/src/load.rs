use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::{CoreError, NodeRecord, Result, Split, TextAttributedGraph};

/// Counts of degenerate rows removed during load.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops_removed: usize,
    pub duplicate_edges_removed: usize,
}

#[derive(Deserialize)]
struct RawNode {
    id: String,
    title: String,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    year: Option<i32>,
}

#[derive(Deserialize)]
struct RawEdge {
    src: String,
    dst: String,
}

fn io_err(path: &Path, source: std::io::Error) -> CoreError {
    CoreError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    BufReader::new(file)
        .lines()
        .map(|l| l.map(|s| s.trim_end_matches('\r').to_string()))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| io_err(path, e))
}

/// Load a text-attributed graph from its three on-disk parts.
///
/// * `nodes_path`: JSONL, one `{"id", "title", "body", "label", "year"}`
///   object per line; `label` is a name that must appear in the vocabulary.
/// * `edges_path`: either TSV lines `src<TAB>dst`, or JSONL objects
///   `{"src", "dst"}` when the file extension is `.jsonl`.
/// * `labels_path`: one label name per line; line order defines label
///   indices.
///
/// Self-loops and duplicate directed edges are removed and counted in the
/// returned [`LoadStats`].
pub fn load_graph(
    nodes_path: &Path,
    edges_path: &Path,
    labels_path: &Path,
) -> Result<(TextAttributedGraph, LoadStats)> {
    let mut label_vocab = Vec::new();
    for (lineno, line) in read_lines(labels_path)?.into_iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        if label_vocab.contains(&line) {
            return Err(CoreError::Parse {
                path: labels_path.display().to_string(),
                line: lineno + 1,
                message: format!("duplicate label name: {line}"),
            });
        }
        label_vocab.push(line);
    }

    let mut nodes = Vec::new();
    for (lineno, line) in read_lines(nodes_path)?.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawNode = serde_json::from_str(&line).map_err(|e| CoreError::Parse {
            path: nodes_path.display().to_string(),
            line: lineno + 1,
            message: e.to_string(),
        })?;
        let label = match raw.label {
            None => None,
            Some(name) => Some(label_vocab.iter().position(|l| *l == name).ok_or_else(|| {
                CoreError::Parse {
                    path: nodes_path.display().to_string(),
                    line: lineno + 1,
                    message: format!("unknown label name: {name}"),
                }
            })?),
        };
        nodes.push(NodeRecord {
            id: raw.id,
            title: raw.title,
            body: raw.body,
            label,
            year: raw.year,
            split: Split::None,
        });
    }

    let jsonl_edges = edges_path.extension().is_some_and(|e| e == "jsonl");
    let mut edges = Vec::new();
    for (lineno, line) in read_lines(edges_path)?.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (src, dst) = if jsonl_edges {
            let raw: RawEdge = serde_json::from_str(&line).map_err(|e| CoreError::Parse {
                path: edges_path.display().to_string(),
                line: lineno + 1,
                message: e.to_string(),
            })?;
            (raw.src, raw.dst)
        } else {
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(d), None) if !s.is_empty() && !d.is_empty() => {
                    (s.to_string(), d.to_string())
                }
                _ => {
                    return Err(CoreError::Parse {
                        path: edges_path.display().to_string(),
                        line: lineno + 1,
                        message: "expected exactly two tab-separated fields".into(),
                    })
                }
            }
        };
        edges.push((src, dst));
    }

    TextAttributedGraph::new(nodes, edges, label_vocab)
}
