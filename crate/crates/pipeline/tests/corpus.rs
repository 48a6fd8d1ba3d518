//! Scripted-resolver construction over a hand-built 50-paper corpus whose
//! citation structure (and therefore the exact expected edge set) is known
//! by construction.

use std::collections::BTreeSet;

use tagbench_pipeline::{
    build_citation_graph, BuildOptions, MatchPolicy, PaperStub, PriorGraph, Resolver,
    ScriptedResolver,
};

const ADJECTIVES: [&str; 10] = [
    "Sparse", "Robust", "Adaptive", "Spectral", "Convex", "Bayesian", "Greedy", "Lazy",
    "Quantized", "Federated",
];
const NOUNS: [&str; 10] = [
    "Quadrature", "Embeddings", "Kernels", "Manifolds", "Transport", "Sketching", "Pruning",
    "Hashing", "Caching", "Routing",
];

fn title(i: usize) -> String {
    format!(
        "{} {} under {} Constraints",
        ADJECTIVES[i % 10],
        NOUNS[(i / 10 + i) % 10],
        ADJECTIVES[(i / 10 + 3) % 10]
    )
}

fn id(i: usize) -> String {
    format!("2301.{i:05}")
}

/// Reference string carrying an arXiv id.
fn id_ref(i: usize) -> String {
    format!("{} arXiv:{}", title(i), id(i))
}

/// Title-only reference with casing and punctuation drift.
fn title_ref(i: usize) -> String {
    format!("{}.", title(i).to_lowercase())
}

fn corpus() -> Vec<PaperStub> {
    let mut papers = Vec::new();
    for i in 0..50 {
        let year = match i {
            0..=5 => 2023,
            10..=26 => 2021,
            _ => 2019,
        };
        let mut refs: Vec<String> = Vec::new();
        match i {
            // seeds: one id reference, one title reference
            0..=5 => {
                refs.push(id_ref(10 + i));
                refs.push(title_ref(20 + i));
                if i == 0 {
                    refs.push("An Unknown Manuscript About Nothing In Particular".into());
                }
                if i == 1 {
                    // id and matching title in one reference: id wins, no search
                    refs.push(id_ref(26));
                }
            }
            // hop-1 papers expand to hop 2
            10..=15 => {
                refs.push(id_ref(30 + (i - 10)));
                if i == 10 {
                    refs.push(title_ref(37));
                }
            }
            20 => refs.push(id_ref(36)),
            // hop-2 papers: id references only count toward existing nodes
            30 => {
                refs.push(id_ref(0));
                refs.push(id_ref(45)); // not in the built graph; ignored
                refs.push(title_ref(48)); // titles are never searched at hop 2
            }
            31 => refs.push(id_ref(10)),
            _ => {}
        }
        papers.push(PaperStub {
            arxiv_id: Some(id(i)),
            title: title(i),
            year,
            raw_reference_strings: refs,
        });
    }
    papers
}

fn expected_edges() -> BTreeSet<(String, String)> {
    let mut edges = BTreeSet::new();
    for i in 0..=5usize {
        edges.insert((id(i), id(10 + i)));
        edges.insert((id(i), id(20 + i)));
    }
    edges.insert((id(1), id(26)));
    for i in 10..=15usize {
        edges.insert((id(i), id(30 + (i - 10))));
    }
    edges.insert((id(10), id(37)));
    edges.insert((id(20), id(36)));
    edges.insert((id(30), id(0)));
    edges.insert((id(31), id(10)));
    edges
}

struct Instrumented<'a> {
    inner: &'a ScriptedResolver,
    searches: std::cell::RefCell<usize>,
}

impl Resolver for Instrumented<'_> {
    fn lookup_by_id(&self, id: &str) -> tagbench_pipeline::Result<Option<PaperStub>> {
        self.inner.lookup_by_id(id)
    }

    fn search_by_title(&self, t: &str) -> tagbench_pipeline::Result<Vec<PaperStub>> {
        *self.searches.borrow_mut() += 1;
        self.inner.search_by_title(t)
    }
}

#[test]
fn corpus_reproduces_known_edge_set() {
    let papers = corpus();
    let resolver = ScriptedResolver::from_stubs(papers.clone());
    let instrumented = Instrumented {
        inner: &resolver,
        searches: std::cell::RefCell::new(0),
    };
    let seeds: Vec<PaperStub> = papers[0..6].to_vec();
    let options = BuildOptions::default();
    let (graph, report) =
        build_citation_graph(&seeds, &instrumented, &MatchPolicy::default(), &options).unwrap();

    let got: BTreeSet<(String, String)> = graph
        .edge_ids()
        .map(|(s, d)| (s.to_string(), d.to_string()))
        .collect();
    assert_eq!(got, expected_edges());
    assert_eq!(graph.node_count(), 27);

    // budget ledger: every per-paper count within budget, total consistent
    // with the instrumented resolver
    for (paper, count) in &report.searches_per_paper {
        assert!(*count <= options.search_budget, "{paper}: {count}");
    }
    assert_eq!(report.total_searches(), *instrumented.searches.borrow());
    // seed 0 searched twice (one title ref, one garbage ref), seeds 1-5 once,
    // paper 10 once; hop-2 papers never search
    assert_eq!(report.searches_per_paper[&id(0)], 2);
    assert_eq!(report.searches_per_paper[&id(1)], 1);
    assert_eq!(report.searches_per_paper[&id(10)], 1);
    assert_eq!(report.searches_per_paper.get(&id(30)), None);
    assert_eq!(report.unresolved_refs, 1);
}

#[test]
fn construction_is_deterministic() {
    let papers = corpus();
    let resolver = ScriptedResolver::from_stubs(papers.clone());
    let seeds: Vec<PaperStub> = papers[0..6].to_vec();
    let options = BuildOptions::default();
    let policy = MatchPolicy::default();
    let (a, ra) = build_citation_graph(&seeds, &resolver, &policy, &options).unwrap();
    let (b, rb) = build_citation_graph(&seeds, &resolver, &policy, &options).unwrap();
    assert!(a.edge_ids().eq(b.edge_ids()));
    assert_eq!(
        a.nodes().iter().map(|n| &n.id).collect::<Vec<_>>(),
        b.nodes().iter().map(|n| &n.id).collect::<Vec<_>>()
    );
    assert_eq!(ra, rb);
}

#[test]
fn hop_discipline_holds() {
    let papers = corpus();
    let resolver = ScriptedResolver::from_stubs(papers.clone());
    let seeds: Vec<PaperStub> = papers[0..6].to_vec();
    let (graph, _) = build_citation_graph(
        &seeds,
        &resolver,
        &MatchPolicy::default(),
        &BuildOptions::default(),
    )
    .unwrap();

    // BFS from the seed set over undirected citation edges
    let mut distance = vec![usize::MAX; graph.node_count()];
    let mut queue = std::collections::VecDeque::new();
    for seed in &papers[0..6] {
        if let Some(i) = graph.node_index(&seed.node_key()) {
            distance[i] = 0;
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in graph.neighbors(v) {
            if distance[u] == usize::MAX {
                distance[u] = distance[v] + 1;
                queue.push_back(u);
            }
        }
    }
    assert!(distance.iter().all(|&d| d <= 2));
}

#[test]
fn two_node_toy_cases() {
    let cited = PaperStub {
        arxiv_id: Some("2301.11111".into()),
        title: "A Cited Paper".into(),
        year: 2023,
        raw_reference_strings: vec![],
    };
    let seed = PaperStub {
        arxiv_id: Some("2301.22222".into()),
        title: "A Citing Paper".into(),
        year: 2023,
        raw_reference_strings: vec!["see arXiv:2301.11111".into()],
    };
    let resolver = ScriptedResolver::from_stubs(vec![cited.clone(), seed.clone()]);
    let (graph, report) = build_citation_graph(
        &[seed],
        &resolver,
        &MatchPolicy::default(),
        &BuildOptions::default(),
    )
    .unwrap();
    assert_eq!(graph.node_count(), 2);
    assert_eq!(graph.edge_count(), 1);
    assert_eq!(report.total_searches(), 0);
}

#[test]
fn budget_exhaustion_skips_references() {
    let targets: Vec<PaperStub> = (0..3)
        .map(|i| PaperStub {
            arxiv_id: Some(format!("2302.0000{i}")),
            title: format!("Distinct Topic Number {i} Report"),
            year: 2023,
            raw_reference_strings: vec![],
        })
        .collect();
    let seed = PaperStub {
        arxiv_id: Some("2302.99999".into()),
        title: "Budget Constrained Seed".into(),
        year: 2023,
        raw_reference_strings: targets.iter().map(|t| t.title.to_lowercase()).collect(),
    };
    let mut corpus = targets;
    corpus.push(seed.clone());
    let resolver = ScriptedResolver::from_stubs(corpus);
    let options = BuildOptions {
        search_budget: 1,
        ..BuildOptions::default()
    };
    let (graph, report) =
        build_citation_graph(&[seed], &resolver, &MatchPolicy::default(), &options).unwrap();
    assert_eq!(graph.edge_count(), 1);
    assert_eq!(report.budget_skipped, 2);
}

#[test]
fn pre_cutoff_papers_match_prior_or_drop() {
    use tagbench_core::{NodeRecord, Split, TextAttributedGraph};

    let prior_nodes = vec![NodeRecord {
        id: "prior-1".into(),
        title: "Classic Result on Convex Transport".into(),
        body: None,
        label: Some(1),
        year: Some(2015),
        split: Split::None,
    }];
    let (prior_graph, _) =
        TextAttributedGraph::new(prior_nodes, vec![], vec!["old".into(), "classic".into()])
            .unwrap();
    let prior = PriorGraph {
        graph: &prior_graph,
        cutoff_year: 2019,
    };

    let matched_old = PaperStub {
        arxiv_id: Some("1501.00001".into()),
        title: "Classic Result on Convex Transport.".into(),
        year: 2015,
        raw_reference_strings: vec![],
    };
    let unmatched_old = PaperStub {
        arxiv_id: Some("1501.00002".into()),
        title: "Completely Forgotten Workshop Notes".into(),
        year: 2015,
        raw_reference_strings: vec![],
    };
    let seed = PaperStub {
        arxiv_id: Some("2301.00100".into()),
        title: "A Modern Seed Paper".into(),
        year: 2023,
        raw_reference_strings: vec![
            "arXiv:1501.00001".into(),
            "arXiv:1501.00002".into(),
        ],
    };
    let resolver = ScriptedResolver::from_stubs(vec![
        matched_old.clone(),
        unmatched_old,
        seed.clone(),
    ]);
    let options = BuildOptions {
        prior: Some(&prior),
        ..BuildOptions::default()
    };
    let (graph, report) =
        build_citation_graph(&[seed], &resolver, &MatchPolicy::default(), &options).unwrap();

    assert_eq!(graph.node_count(), 2);
    assert_eq!(report.excluded_pre_cutoff, 1);
    let kept = graph.node("1501.00001").unwrap();
    assert_eq!(kept.label, Some(1));
    assert_eq!(graph.label_vocab(), ["old".to_string(), "classic".to_string()]);
}
