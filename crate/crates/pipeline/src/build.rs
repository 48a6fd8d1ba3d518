use std::collections::{BTreeMap, HashMap};

use tagbench_core::{NodeRecord, Split, TextAttributedGraph};

use crate::{
    extract_arxiv_ids, normalized_levenshtein, title_match, MatchPolicy, PaperStub,
    PipelineError, Resolver, Result,
};

/// Prior benchmark graph used to anchor pre-cutoff papers. Papers published
/// before `cutoff_year` must title-match a prior node (inheriting its label)
/// or they are excluded from the output.
pub struct PriorGraph<'a> {
    pub graph: &'a TextAttributedGraph,
    pub cutoff_year: i32,
}

#[derive(Clone)]
pub struct BuildOptions<'a> {
    /// Node expansion depth from the seeds.
    pub hops: u32,
    /// Maximum title searches attributed to any single paper.
    pub search_budget: usize,
    /// Transport-failure retries per resolver call.
    pub transport_retries: u32,
    pub prior: Option<&'a PriorGraph<'a>>,
}

impl Default for BuildOptions<'_> {
    fn default() -> Self {
        Self {
            hops: 2,
            search_budget: 30,
            transport_retries: 2,
            prior: None,
        }
    }
}

/// Construction audit trail.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// Title-search calls attributed to each paper key.
    pub searches_per_paper: BTreeMap<String, usize>,
    /// References that resolved to nothing.
    pub unresolved_refs: usize,
    /// References skipped because their paper's search budget ran out.
    pub budget_skipped: usize,
    /// Pre-cutoff papers excluded for lacking a prior-graph match.
    pub excluded_pre_cutoff: usize,
    /// Resolver calls that kept failing after retries.
    pub transport_failures: usize,
}

impl BuildReport {
    pub fn total_searches(&self) -> usize {
        self.searches_per_paper.values().sum()
    }
}

struct Assembly {
    papers: Vec<PaperStub>,
    levels: Vec<u32>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
}

impl Assembly {
    fn insert(&mut self, stub: PaperStub, level: u32) -> usize {
        let key = stub.node_key();
        match self.index.get(&key) {
            Some(&i) => i,
            None => {
                let i = self.papers.len();
                self.papers.push(stub);
                self.levels.push(level);
                self.index.insert(key, i);
                i
            }
        }
    }
}

fn retrying<T>(
    retries: u32,
    report: &mut BuildReport,
    mut call: impl FnMut() -> Result<T>,
) -> Result<Option<T>> {
    let mut attempt = 0;
    loop {
        match call() {
            Ok(v) => return Ok(Some(v)),
            Err(PipelineError::Transport(_)) if attempt < retries => attempt += 1,
            Err(PipelineError::Transport(_)) => {
                report.transport_failures += 1;
                return Ok(None);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Build a citation graph around `seeds`.
///
/// Seeds and every paper up to `hops - 1` levels out have their references
/// resolved by arXiv-id lookup first; references without a matched id fall
/// back to fuzzy title search, at most `search_budget` searches per paper.
/// Papers at the outermost level contribute edges by id matching only, and
/// only toward papers already in the node set. Every resolved citation
/// `(citing, cited)` among included nodes becomes a directed edge.
pub fn build_citation_graph(
    seeds: &[PaperStub],
    resolver: &dyn Resolver,
    policy: &MatchPolicy,
    options: &BuildOptions,
) -> Result<(TextAttributedGraph, BuildReport)> {
    if !(1..=2).contains(&options.hops) {
        return Err(PipelineError::Argument(format!(
            "hops must be 1 or 2, got {}",
            options.hops
        )));
    }
    let mut report = BuildReport::default();
    let mut assembly = Assembly {
        papers: Vec::new(),
        levels: Vec::new(),
        index: HashMap::new(),
        edges: Vec::new(),
    };
    for seed in seeds {
        assembly.insert(seed.clone(), 0);
    }

    // full resolution (id lookup, then budgeted title search) for all levels
    // below the outermost
    let mut cursor = 0usize;
    while cursor < assembly.papers.len() {
        let src = cursor;
        cursor += 1;
        if assembly.levels[src] >= options.hops {
            continue;
        }
        let stub = assembly.papers[src].clone();
        let src_key = stub.node_key();
        let mut searches_used = 0usize;

        for reference in &stub.raw_reference_strings {
            let mut resolved: Option<PaperStub> = None;
            for id in extract_arxiv_ids(reference) {
                let Some(hit) =
                    retrying(options.transport_retries, &mut report, || {
                        resolver.lookup_by_id(&id)
                    })?
                else {
                    continue;
                };
                if let Some(stub) = hit {
                    resolved = Some(stub);
                    break;
                }
            }
            if resolved.is_none() {
                if searches_used >= options.search_budget {
                    report.budget_skipped += 1;
                    continue;
                }
                searches_used += 1;
                let candidates = retrying(options.transport_retries, &mut report, || {
                    resolver.search_by_title(reference)
                })?;
                if let Some(candidates) = candidates {
                    resolved = candidates
                        .into_iter()
                        .find(|c| title_match(&c.title, reference, policy));
                }
            }
            match resolved {
                Some(cited) => {
                    let dst = assembly.insert(cited, assembly.levels[src] + 1);
                    assembly.edges.push((src, dst));
                }
                None => report.unresolved_refs += 1,
            }
        }
        report.searches_per_paper.insert(src_key, searches_used);
    }

    // outermost level: id matching only, edges toward existing nodes
    for src in 0..assembly.papers.len() {
        if assembly.levels[src] != options.hops {
            continue;
        }
        let refs = assembly.papers[src].raw_reference_strings.clone();
        for reference in &refs {
            for id in extract_arxiv_ids(reference) {
                if let Some(&dst) = assembly.index.get(&id) {
                    assembly.edges.push((src, dst));
                }
            }
        }
    }

    // pre-cutoff papers must match the prior graph by title
    let mut labels: Vec<Option<usize>> = vec![None; assembly.papers.len()];
    let mut keep: Vec<bool> = vec![true; assembly.papers.len()];
    let mut vocab: Vec<String> = Vec::new();
    if let Some(prior) = options.prior {
        vocab = prior.graph.label_vocab().to_vec();
        for (i, paper) in assembly.papers.iter().enumerate() {
            if paper.year >= prior.cutoff_year {
                continue;
            }
            let best = prior
                .graph
                .nodes()
                .iter()
                .map(|n| (normalized_levenshtein(&n.title, &paper.title), n))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            match best {
                Some((distance, node)) if distance <= policy.threshold => {
                    labels[i] = node.label;
                }
                _ => {
                    keep[i] = false;
                    report.excluded_pre_cutoff += 1;
                }
            }
        }
    }

    let nodes: Vec<NodeRecord> = assembly
        .papers
        .iter()
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(i, p)| NodeRecord {
            id: p.node_key(),
            title: p.title.clone(),
            body: None,
            label: labels[i],
            year: Some(p.year),
            split: Split::None,
        })
        .collect();
    let edges: Vec<(String, String)> = assembly
        .edges
        .iter()
        .filter(|(s, d)| keep[*s] && keep[*d])
        .map(|&(s, d)| {
            (
                assembly.papers[s].node_key(),
                assembly.papers[d].node_key(),
            )
        })
        .collect();

    let (graph, _) = TextAttributedGraph::new(nodes, edges, vocab)?;
    Ok((graph, report))
}
