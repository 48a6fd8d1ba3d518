use serde::{Deserialize, Serialize};

/// Ego-local rewiring strategies.
///
/// * `random`: keep target-to-hop-1 edges, re-attach each hop-2 node to one
///   independently chosen hop-1 node.
/// * `extreme`: as random, but a single hop-1 node receives every hop-2
///   attachment.
/// * `path`: chain the hop-1 nodes in a random order; the target keeps one
///   edge to the chain head; hop-2 nodes keep an edge to their original
///   parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewireKind {
    Random,
    Extreme,
    Path,
}

impl std::fmt::Display for RewireKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RewireKind::Random => "random",
            RewireKind::Extreme => "extreme",
            RewireKind::Path => "path",
        })
    }
}

/// Neighbor drop/add modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropMode {
    DropSame,
    DropDifferent,
    DropRandom,
    AddSame,
    AddDifferent,
    AddRandom,
}

impl DropMode {
    pub fn is_add(self) -> bool {
        matches!(
            self,
            DropMode::AddSame | DropMode::AddDifferent | DropMode::AddRandom
        )
    }

    pub fn needs_labels(self) -> bool {
        !matches!(self, DropMode::DropRandom | DropMode::AddRandom)
    }
}

impl std::fmt::Display for DropMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DropMode::DropSame => "drop_same",
            DropMode::DropDifferent => "drop_different",
            DropMode::DropRandom => "drop_random",
            DropMode::AddSame => "add_same",
            DropMode::AddDifferent => "add_different",
            DropMode::AddRandom => "add_random",
        })
    }
}

/// A neighbor drop/add specification: mode, fraction and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropSpec {
    pub mode: DropMode,
    pub p: f64,
    pub seed: u64,
}

impl DropSpec {
    pub fn new(mode: DropMode, p: f64, seed: u64) -> Self {
        Self { mode, p, seed }
    }
}

/// How neighbors are rendered in the label-information ablation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborStyle {
    TitleAndLabel,
    TitleOnly,
    LabelOnly,
}

/// One perturbation as written in experiment configs and prediction
/// records: either `{"mode": ..., "p": ..., "seed": ...}` or
/// `{"rewire": ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerturbationSpec {
    Drop(DropSpec),
    Rewire { rewire: RewireKind },
}

impl std::fmt::Display for PerturbationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerturbationSpec::Drop(d) => write!(f, "{}@{}", d.mode, d.p),
            PerturbationSpec::Rewire { rewire } => write!(f, "rewire-{rewire}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_serialization_shapes() {
        let drop = PerturbationSpec::Drop(DropSpec::new(DropMode::DropSame, 0.5, 7));
        let json = serde_json::to_string(&drop).unwrap();
        assert_eq!(json, r#"{"mode":"drop_same","p":0.5,"seed":7}"#);

        let rewire = PerturbationSpec::Rewire {
            rewire: RewireKind::Path,
        };
        assert_eq!(serde_json::to_string(&rewire).unwrap(), r#"{"rewire":"path"}"#);

        let back: PerturbationSpec =
            serde_json::from_str(r#"{"mode":"add_random","p":1.0,"seed":3}"#).unwrap();
        assert!(matches!(back, PerturbationSpec::Drop(d) if d.mode == DropMode::AddRandom));
    }
}
