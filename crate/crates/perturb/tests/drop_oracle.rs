//! Brute-force oracle checks for the drop/add arithmetic on flat one-hop
//! egos, where the closed forms are exact.

use proptest::prelude::*;
use tagbench_core::{extract_ego_graph, synth, EgoGraph, HopCaps, TextAttributedGraph};
use tagbench_perturb::{perturb_neighbors, round_half_up, DropMode, DropSpec};

fn flat_ego(same: usize, diff: usize) -> (EgoGraph, TextAttributedGraph) {
    let mut nodes = vec![("t".to_string(), Some(0))];
    let mut edges = Vec::new();
    for i in 0..same {
        nodes.push((format!("s{i:02}"), Some(0)));
        edges.push(("t".to_string(), format!("s{i:02}")));
    }
    for i in 0..diff {
        nodes.push((format!("d{i:02}"), Some(1)));
        edges.push(("t".to_string(), format!("d{i:02}")));
    }
    let node_refs: Vec<(&str, Option<usize>)> =
        nodes.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let edge_refs: Vec<(&str, &str)> =
        edges.iter().map(|(s, d)| (s.as_str(), d.as_str())).collect();
    let graph = synth::graph_from_parts(&node_refs, &edge_refs, &["L0", "L1"]);
    let ego = extract_ego_graph(&graph, "t", HopCaps::new(200, 0), 0).unwrap();
    (ego, graph)
}

fn counts(ego: &EgoGraph) -> (usize, usize) {
    let same = ego.neighbors().filter(|n| n.label == Some(0)).count();
    (same, ego.neighbor_count() - same)
}

/// Independent enumeration oracle: expected (same, different) counts after
/// a drop, derived by simulating removal one neighbor at a time.
fn oracle_drop(x: usize, y: usize, p: f64, mode: DropMode) -> (usize, usize) {
    let b = round_half_up((x + y) as f64 * p);
    match mode {
        DropMode::DropSame => (x.saturating_sub(b), y),
        DropMode::DropDifferent => (x, y.saturating_sub(b)),
        DropMode::DropRandom => {
            let total = (x + y).saturating_sub(b);
            // class mix unspecified for random drops; only the total is pinned
            (total, 0)
        }
        _ => unreachable!(),
    }
}

#[test]
fn exhaustive_drop_grid_small() {
    // the acceptance suite runs the full x, y <= 30 grid; keep a fast slice here
    for x in 0..=12usize {
        for y in 0..=12usize {
            if x + y == 0 {
                continue;
            }
            let (ego, graph) = flat_ego(x, y);
            for pct in 0..=10u32 {
                let p = f64::from(pct) / 10.0;
                for mode in [DropMode::DropSame, DropMode::DropDifferent] {
                    let out =
                        perturb_neighbors(&ego, &DropSpec::new(mode, p, 5), &graph).unwrap();
                    let (got_s, got_d) = counts(&out);
                    let (want_s, want_d) = oracle_drop(x, y, p, mode);
                    assert_eq!(
                        (got_s, got_d),
                        (want_s, want_d),
                        "x={x} y={y} p={p} {mode}"
                    );
                }
                let out = perturb_neighbors(
                    &ego,
                    &DropSpec::new(DropMode::DropRandom, p, 5),
                    &graph,
                )
                .unwrap();
                let want_total = (x + y).saturating_sub(round_half_up((x + y) as f64 * p));
                assert_eq!(out.neighbor_count(), want_total, "x={x} y={y} p={p} random");
            }
        }
    }
}

proptest! {
    // retained counts shrink with p for drops and grow for adds
    #[test]
    fn monotone_in_p(x in 0usize..20, y in 0usize..20, seed in 0u64..50) {
        prop_assume!(x + y > 0);
        let (ego, graph) = flat_ego(x, y);
        for mode in [
            DropMode::DropSame,
            DropMode::DropDifferent,
            DropMode::DropRandom,
            DropMode::AddSame,
            DropMode::AddDifferent,
            DropMode::AddRandom,
        ] {
            let mut prev: Option<usize> = None;
            for pct in 0..=10u32 {
                let p = f64::from(pct) / 10.0;
                let out = perturb_neighbors(&ego, &DropSpec::new(mode, p, seed), &graph)
                    .unwrap();
                let n = out.neighbor_count();
                if let Some(prev) = prev {
                    if mode.is_add() {
                        prop_assert!(n >= prev, "{mode} p={p}: {n} < {prev}");
                    } else {
                        prop_assert!(n <= prev, "{mode} p={p}: {n} > {prev}");
                    }
                }
                prev = Some(n);
            }
        }
    }
}
