use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;

use crate::{derived_rng, CoreError, Result, Split, TextAttributedGraph};

/// A node-id to split-tag mapping with deterministic (sorted) iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitAssignment {
    map: BTreeMap<String, Split>,
}

impl SplitAssignment {
    pub fn get(&self, id: &str) -> Split {
        self.map.get(id).copied().unwrap_or(Split::None)
    }

    pub fn set(&mut self, id: String, split: Split) {
        self.map.insert(id, split);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Split)> {
        self.map.iter().map(|(id, s)| (id.as_str(), *s))
    }

    pub fn count(&self, split: Split) -> usize {
        self.map.values().filter(|&&s| s == split).count()
    }

    /// Ids with the given split tag, in sorted id order.
    pub fn ids_with(&self, split: Split) -> Vec<&str> {
        self.map
            .iter()
            .filter(|(_, &s)| s == split)
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

/// Assign splits by seeded shuffling: `floor(fraction * |nodes|)` nodes per
/// split, remainder unassigned.
pub fn split_by_ratio(
    graph: &TextAttributedGraph,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<SplitAssignment> {
    let (train, val, test) = ratios;
    for (name, frac) in [("train", train), ("validation", val), ("test", test)] {
        if !(0.0..=1.0).contains(&frac) {
            return Err(CoreError::Argument(format!(
                "{name} fraction {frac} outside [0, 1]"
            )));
        }
    }
    if train + val + test > 1.0 + 1e-12 {
        return Err(CoreError::Argument(format!(
            "split fractions sum to {} > 1",
            train + val + test
        )));
    }

    let n = graph.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = derived_rng("split-ratio", "", seed);
    order.shuffle(&mut rng);

    let n_train = (train * n as f64).floor() as usize;
    let n_val = (val * n as f64).floor() as usize;
    let n_test = (test * n as f64).floor() as usize;

    let mut assignment = SplitAssignment::default();
    for (pos, &idx) in order.iter().enumerate() {
        let split = if pos < n_train {
            Split::Train
        } else if pos < n_train + n_val {
            Split::Validation
        } else if pos < n_train + n_val + n_test {
            Split::Test
        } else {
            Split::None
        };
        assignment.set(graph.node_by_index(idx).id.clone(), split);
    }
    Ok(assignment)
}

/// Assign splits by publication year: years before `train_before` train,
/// years in `val_years` validate, years in `test_years` test, everything
/// else (including missing years) unassigned.
pub fn split_by_year(
    graph: &TextAttributedGraph,
    train_before: i32,
    val_years: &BTreeSet<i32>,
    test_years: &BTreeSet<i32>,
) -> Result<SplitAssignment> {
    if val_years.intersection(test_years).next().is_some() {
        return Err(CoreError::Argument(
            "validation and test year sets overlap".into(),
        ));
    }
    let mut assignment = SplitAssignment::default();
    for node in graph.nodes() {
        let split = match node.year {
            Some(y) if y < train_before => Split::Train,
            Some(y) if val_years.contains(&y) => Split::Validation,
            Some(y) if test_years.contains(&y) => Split::Test,
            _ => Split::None,
        };
        assignment.set(node.id.clone(), split);
    }
    Ok(assignment)
}

/// Sample `n` distinct test node ids, deterministic under `seed`.
pub fn sample_test_nodes(
    assignment: &SplitAssignment,
    n: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let test_ids = assignment.ids_with(Split::Test);
    if n > test_ids.len() {
        return Err(CoreError::Argument(format!(
            "requested {n} test nodes but only {} available",
            test_ids.len()
        )));
    }
    let mut rng = derived_rng("sample-test", "", seed);
    let chosen = rand::seq::index::sample(&mut rng, test_ids.len(), n);
    Ok(chosen.iter().map(|i| test_ids[i].to_string()).collect())
}
