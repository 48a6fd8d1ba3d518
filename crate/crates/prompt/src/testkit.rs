//! Canonical fixture ego and profiles shared by the golden prompt tests and
//! the workspace acceptance suite.

use tagbench_core::{EgoGraph, HopCaps, NodeRecord, Split};

use crate::{DatasetProfile, Exemplar};

fn node(
    id: &str,
    title: &str,
    body: Option<&str>,
    label: Option<usize>,
    split: Split,
) -> NodeRecord {
    NodeRecord {
        id: id.to_string(),
        title: title.to_string(),
        body: body.map(|s| s.to_string()),
        label,
        year: Some(2023),
        split,
    }
}

/// A hand-built two-hop ego with mixed neighbor splits and labels.
///
/// Neighbor enumeration: n1=1, n2=2, n3=3 (hop 1), n4=4, n5=5 (hop 2).
/// Labeled neighbors: 5; sharing the target label: 2 (homophily 0.4).
pub fn fixture_ego() -> EgoGraph {
    let target = node(
        "t",
        "Adaptive Mesh Refinement for Wave Equations",
        Some("We study adaptive mesh refinement strategies for hyperbolic wave equations and derive sharp error bounds."),
        Some(1),
        Split::Test,
    );
    let hop1 = vec![
        node(
            "n1",
            "Spectral Methods for Conservation Laws",
            Some("Spectral discretizations of conservation laws are analyzed."),
            Some(1),
            Split::Train,
        ),
        node(
            "n2",
            "A Survey of Finite Element Preconditioners",
            None,
            Some(0),
            Split::Test,
        ),
        node(
            "n3",
            "Multigrid Solvers on Unstructured Grids",
            None,
            Some(2),
            Split::Validation,
        ),
    ];
    let hop2 = vec![
        node("n4", "Parallel Sparse Matrix Kernels", None, Some(1), Split::None),
        node(
            "n5",
            "Error Analysis of Runge-Kutta Schemes",
            None,
            Some(0),
            Split::Train,
        ),
    ];
    let intra_edges = [
        ("t", "n1"),
        ("t", "n2"),
        ("n3", "t"),
        ("n1", "n3"),
        ("n1", "n4"),
        ("n5", "n3"),
        ("n2", "n5"),
    ]
    .iter()
    .map(|(s, d)| (s.to_string(), d.to_string()))
    .collect();

    EgoGraph {
        target,
        hop1,
        hop2,
        intra_edges,
        caps: HopCaps::new(20, 5),
        seed: 0,
    }
}

/// ArXiv profile over the three-label vocabulary used by [`fixture_ego`].
pub fn arxiv_profile() -> DatasetProfile {
    DatasetProfile::arxiv(
        "arxiv",
        vec!["cs.CE".into(), "cs.NA".into(), "cs.MS".into()],
    )
}

/// Cora profile; fixture label indices map into the seven category names.
pub fn cora_profile() -> DatasetProfile {
    DatasetProfile::cora()
}

/// Two fixed exemplars for few-shot goldens, labeled per profile vocabulary.
pub fn fixture_exemplars(profile: &DatasetProfile) -> Vec<Exemplar> {
    vec![
        Exemplar {
            node_id: "x1".into(),
            title: "Lattice Boltzmann Methods at Scale".into(),
            abstract_text: Some(
                "We benchmark lattice Boltzmann kernels on heterogeneous clusters.".into(),
            ),
            label_name: profile.label_vocab[1].clone(),
        },
        Exemplar {
            node_id: "x2".into(),
            title: "Compressed Sensing with Structured Dictionaries".into(),
            abstract_text: Some(
                "Recovery guarantees are derived for structured measurement dictionaries.".into(),
            ),
            label_name: profile.label_vocab[0].clone(),
        },
    ]
}
