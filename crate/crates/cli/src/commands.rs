//! Subcommand entry points. Each takes the parsed config plus the command
//! line overrides and returns a `CliError` whose exit code the binary
//! propagates.

use std::io::Write;
use std::path::{Path, PathBuf};

use tagbench_core::{load_graph, split_by_ratio, split_by_year, Split, TextAttributedGraph};
use tagbench_mpnn::{featurize, GraphOps, ModelKind, SearchSpace, SplitIndices};
use tagbench_pipeline::{
    build_citation_graph, select_seeds, BuildOptions, HttpResolver, MatchPolicy, PriorGraph,
    Resolver, ScriptedResolver,
};

use crate::config::{parse_config_file, ConfigFile, SplitPlan, SplitSection};
use crate::{runner, validate_config, CliError, Result};

fn out_dir(explicit: Option<&Path>, fallback: Option<&PathBuf>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| fallback.cloned())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn split_plan_of(section: &SplitSection, default_seed: u64) -> Result<SplitPlan> {
    let mut errors = Vec::new();
    let plan = match section.kind.as_str() {
        "ratio" => {
            let train = section.train.unwrap_or(0.0);
            let val = section.val.unwrap_or(0.0);
            let test = section.test.unwrap_or(0.0);
            if train + val + test > 1.0 + 1e-12 {
                errors.push(format!("split fractions sum to {} > 1", train + val + test));
            }
            Some(SplitPlan::Ratio {
                train,
                val,
                test,
                seed: section.seed.unwrap_or(default_seed),
            })
        }
        "year" => Some(SplitPlan::Year {
            train_before: section
                .train_before
                .unwrap_or_else(|| {
                    errors.push("split.train_before required".into());
                    0
                }),
            val_years: section.val_years.clone(),
            test_years: section.test_years.clone(),
        }),
        other => {
            errors.push(format!("split.kind: unknown kind {other:?}"));
            None
        }
    };
    match plan {
        Some(plan) if errors.is_empty() => Ok(plan),
        _ => Err(CliError::Validation(errors)),
    }
}

fn load_dataset(file: &ConfigFile) -> Result<TextAttributedGraph> {
    let (graph, stats) = load_graph(
        &file.dataset.nodes,
        &file.dataset.edges,
        &file.dataset.labels,
    )
    .map_err(CliError::runtime)?;
    if stats.self_loops_removed + stats.duplicate_edges_removed > 0 {
        eprintln!(
            "load: removed {} self-loop(s), {} duplicate edge(s)",
            stats.self_loops_removed, stats.duplicate_edges_removed
        );
    }
    Ok(graph)
}

fn assignment_for(
    graph: &TextAttributedGraph,
    plan: &SplitPlan,
) -> Result<tagbench_core::SplitAssignment> {
    match plan {
        SplitPlan::Ratio {
            train,
            val,
            test,
            seed,
        } => split_by_ratio(graph, (*train, *val, *test), *seed).map_err(CliError::runtime),
        SplitPlan::Year {
            train_before,
            val_years,
            test_years,
        } => split_by_year(
            graph,
            *train_before,
            &val_years.iter().copied().collect(),
            &test_years.iter().copied().collect(),
        )
        .map_err(CliError::runtime),
    }
}

/// `tagbench run`: the full experiment.
pub fn cmd_run(config_path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let config = validate_config(config_path, seed, out)?;
    let outcome = runner::run_experiment(&config)?;
    println!(
        "run complete: {} record(s), {} dispatched, {} failed; outputs in {}",
        outcome.records.len(),
        outcome.manifest.dispatched,
        outcome.manifest.failed,
        config.output_dir.display()
    );
    for row in &outcome.report.accuracy {
        println!(
            "  {} [{}]: accuracy {:.4} (n={}, unparsable {:.3})",
            row.style, row.context, row.accuracy, row.n, row.unparsable_rate
        );
    }
    Ok(())
}

/// `tagbench split`: compute and export the split assignment.
pub fn cmd_split(config_path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let (file, _) = parse_config_file(config_path)?;
    let section = file
        .split
        .clone()
        .ok_or_else(|| CliError::Validation(vec!["missing [split] section".into()]))?;
    let plan = split_plan_of(&section, seed.unwrap_or(0))?;
    let graph = load_dataset(&file)?;
    let assignment = assignment_for(&graph, &plan)?;

    let dir = out_dir(out, None);
    std::fs::create_dir_all(&dir).map_err(CliError::runtime)?;
    let path = dir.join("splits.jsonl");
    let mut handle = std::fs::File::create(&path).map_err(CliError::runtime)?;
    for (id, split) in assignment.iter() {
        writeln!(
            handle,
            "{}",
            serde_json::json!({"id": id, "split": split.to_string()})
        )
        .map_err(CliError::runtime)?;
    }
    println!(
        "split written to {}: train {}, validation {}, test {}, none {}",
        path.display(),
        assignment.count(Split::Train),
        assignment.count(Split::Validation),
        assignment.count(Split::Test),
        assignment.count(Split::None),
    );
    Ok(())
}

/// `tagbench prepare`: build a citation graph from a corpus.
pub fn cmd_prepare(config_path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let (file, _) = parse_config_file(config_path)?;
    let section = file
        .prepare
        .clone()
        .ok_or_else(|| CliError::Validation(vec!["missing [prepare] section".into()]))?;

    let corpus = ScriptedResolver::from_jsonl(&section.corpus).map_err(CliError::runtime)?;
    let seeds = select_seeds(
        corpus.papers(),
        section.year_min,
        section.year_max,
        section.n_seeds,
        seed.or(section.seed).unwrap_or(0),
    )
    .map_err(CliError::runtime)?;

    let policy = match section.threshold {
        Some(t) => MatchPolicy::new(t).map_err(CliError::runtime)?,
        None => MatchPolicy::default(),
    };

    let prior_graph = match (&section.prior_nodes, &section.prior_edges, &section.prior_labels) {
        (Some(n), Some(e), Some(l)) => {
            Some(load_graph(n, e, l).map_err(CliError::runtime)?.0)
        }
        (None, None, None) => None,
        _ => {
            return Err(CliError::Validation(vec![
                "prepare.prior_nodes/prior_edges/prior_labels must be set together".into(),
            ]))
        }
    };
    let prior = prior_graph.as_ref().map(|graph| PriorGraph {
        graph,
        cutoff_year: section.cutoff_year.unwrap_or(2019),
    });

    let options = BuildOptions {
        hops: section.hops.unwrap_or(2),
        search_budget: section.search_budget.unwrap_or(30),
        transport_retries: 2,
        prior: prior.as_ref(),
    };
    let http_resolver = section.http.clone().map(HttpResolver::new);
    let resolver: &dyn Resolver = match &http_resolver {
        Some(http) => http,
        None => &corpus,
    };
    let (graph, report) =
        build_citation_graph(&seeds, resolver, &policy, &options).map_err(CliError::runtime)?;

    let dir = out_dir(out, None);
    std::fs::create_dir_all(&dir).map_err(CliError::runtime)?;
    write_graph_files(&graph, &dir)?;
    std::fs::write(
        dir.join("build_report.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "unresolved_refs": report.unresolved_refs,
            "budget_skipped": report.budget_skipped,
            "excluded_pre_cutoff": report.excluded_pre_cutoff,
            "transport_failures": report.transport_failures,
            "total_searches": report.total_searches(),
        }))
        .expect("json serializes"),
    )
    .map_err(CliError::runtime)?;
    println!(
        "prepared graph: {} nodes, {} edges -> {}",
        graph.node_count(),
        graph.edge_count(),
        dir.display()
    );
    Ok(())
}

fn write_graph_files(graph: &TextAttributedGraph, dir: &Path) -> Result<()> {
    let mut nodes = std::fs::File::create(dir.join("nodes.jsonl")).map_err(CliError::runtime)?;
    for node in graph.nodes() {
        let label = node.label.and_then(|l| graph.label_name(l));
        writeln!(
            nodes,
            "{}",
            serde_json::json!({
                "id": node.id,
                "title": node.title,
                "body": node.body,
                "label": label,
                "year": node.year,
            })
        )
        .map_err(CliError::runtime)?;
    }
    let mut edges = std::fs::File::create(dir.join("edges.tsv")).map_err(CliError::runtime)?;
    for (s, d) in graph.edge_ids() {
        writeln!(edges, "{s}\t{d}").map_err(CliError::runtime)?;
    }
    let mut labels = std::fs::File::create(dir.join("labels.txt")).map_err(CliError::runtime)?;
    for name in graph.label_vocab() {
        writeln!(labels, "{name}").map_err(CliError::runtime)?;
    }
    Ok(())
}

/// `tagbench report`: rebuild the report from an existing records file.
pub fn cmd_report(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let (file, digest) = parse_config_file(config_path)?;
    let dir = out_dir(
        out,
        file.experiment.as_ref().and_then(|e| e.output_dir.as_ref()),
    );
    let records_path = dir.join("records.jsonl");
    let records = tagbench_analysis::read_records(&records_path).map_err(CliError::runtime)?;
    if records.is_empty() {
        return Err(CliError::Runtime(format!(
            "no records in {}",
            records_path.display()
        )));
    }
    let meta = tagbench_analysis::ReportMeta {
        dataset: file.dataset.profile.clone(),
        model_tag: file
            .backend
            .as_ref()
            .and_then(|b| b.model_tag.clone())
            .unwrap_or_default(),
        seed: file.experiment.as_ref().map(|e| e.seed).unwrap_or(0),
        config_digest: digest,
        started_at: String::new(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        generator_version: tagbench_core::GENERATOR_VERSION.to_string(),
    };
    let report = tagbench_analysis::build_report(&records, meta).map_err(CliError::runtime)?;
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(CliError::runtime)?;
    tagbench_analysis::write_curve_tsvs(&report.curves, &dir).map_err(CliError::runtime)?;
    println!("report rebuilt from {} record(s)", records.len());
    Ok(())
}

/// `tagbench mpnn`: hyperparameter search plus optional rewired evaluation.
pub fn cmd_mpnn(config_path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let (file, _) = parse_config_file(config_path)?;
    let section = file
        .mpnn
        .clone()
        .ok_or_else(|| CliError::Validation(vec!["missing [mpnn] section".into()]))?;
    let split_section = file
        .split
        .clone()
        .ok_or_else(|| CliError::Validation(vec!["missing [split] section".into()]))?;
    let kind = match section.model.as_str() {
        "gcn" => ModelKind::Gcn,
        "sage" => ModelKind::Sage,
        other => {
            return Err(CliError::Validation(vec![format!(
                "mpnn.model: unknown model {other:?}"
            )]))
        }
    };

    let seed = seed.unwrap_or(0);
    let mut graph = load_dataset(&file)?;
    let plan = split_plan_of(&split_section, seed)?;
    let assignment = assignment_for(&graph, &plan)?;
    graph.apply_split(&assignment).map_err(CliError::runtime)?;

    let features = featurize(
        &graph,
        section.feature_dim.unwrap_or(128),
        section.feature_seed.unwrap_or(0),
    );
    let labels: Vec<Option<usize>> = graph.nodes().iter().map(|n| n.label).collect();
    let splits = SplitIndices::from_graph(&graph);
    let ops = GraphOps::from_graph(&graph);
    let classes = graph.label_vocab().len();

    let (winner, rows) = tagbench_mpnn::random_search(
        kind,
        &ops,
        &features,
        &labels,
        &splits,
        classes,
        &SearchSpace::default(),
        section.n_configs.unwrap_or(10),
        section.n_repeats.unwrap_or(3),
        section.max_epochs.unwrap_or(2000),
        section.patience.unwrap_or(100),
        seed,
    )
    .map_err(CliError::runtime)?;

    let dir = out_dir(out, None);
    std::fs::create_dir_all(&dir).map_err(CliError::runtime)?;
    let mut tsv = std::fs::File::create(dir.join("scores.tsv")).map_err(CliError::runtime)?;
    writeln!(
        tsv,
        "layers\thidden\tlearning_rate\tdropout\tweight_decay\tmean_val\tstd_val\ttest"
    )
    .map_err(CliError::runtime)?;
    for row in &rows {
        writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            row.config.layers,
            row.config.hidden,
            row.config.learning_rate,
            row.config.dropout,
            row.config.weight_decay,
            row.mean_val_accuracy,
            row.std_val_accuracy,
            row.test_accuracy
        )
        .map_err(CliError::runtime)?;
    }

    // retrain the winner for the summary (and the optional rewired eval)
    let final_config = tagbench_mpnn::TrainConfig {
        seed,
        ..winner
    };
    let result = tagbench_mpnn::train(
        kind,
        &ops,
        &features,
        &labels,
        &splits,
        classes,
        &final_config,
    )
    .map_err(CliError::runtime)?;

    let mut summary = serde_json::json!({
        "model": section.model,
        "winner": winner,
        "val_accuracy": result.val_accuracy,
        "test_accuracy": result.test_accuracy,
    });
    if let Some(strategy) = &section.rewire_eval {
        let kind_rw = match strategy.as_str() {
            "random" => tagbench_perturb::RewireKind::Random,
            "extreme" => tagbench_perturb::RewireKind::Extreme,
            "path" => tagbench_perturb::RewireKind::Path,
            other => {
                return Err(CliError::Validation(vec![format!(
                    "mpnn.rewire_eval: unknown strategy {other:?}"
                )]))
            }
        };
        let caps = tagbench_core::HopCaps::new(
            file.dataset.hop1_max.unwrap_or(20),
            file.dataset.hop2_max.unwrap_or(5),
        );
        let rewired_acc = rewired_test_accuracy(
            &graph,
            &features,
            &labels,
            &splits,
            &result.params,
            caps,
            kind_rw,
            seed,
        )?;
        summary["rewired_test_accuracy"] = serde_json::json!(rewired_acc);
        summary["rewire_strategy"] = serde_json::json!(strategy);
    }
    std::fs::write(
        dir.join("mpnn_summary.json"),
        serde_json::to_string_pretty(&summary).expect("json serializes"),
    )
    .map_err(CliError::runtime)?;
    println!(
        "search done: winner layers={} hidden={} lr={} -> val {:.4}, test {:.4}",
        winner.layers, winner.hidden, winner.learning_rate, result.val_accuracy, result.test_accuracy
    );
    Ok(())
}

/// Test accuracy when each test node's ego is rewired and the surgery is
/// lifted to the global graph, one target at a time.
#[allow(clippy::too_many_arguments)]
pub fn rewired_test_accuracy(
    graph: &TextAttributedGraph,
    features: &ndarray::Array2<f64>,
    labels: &[Option<usize>],
    splits: &SplitIndices,
    params: &tagbench_mpnn::ModelParams,
    caps: tagbench_core::HopCaps,
    strategy: tagbench_perturb::RewireKind,
    seed: u64,
) -> Result<f64> {
    let mut correct = 0usize;
    for &v in &splits.test {
        let node = &graph.nodes()[v];
        let ego =
            tagbench_core::extract_ego_graph(graph, &node.id, caps, seed).map_err(CliError::runtime)?;
        let rewired = tagbench_perturb::rewire(&ego, strategy, seed).map_err(CliError::runtime)?;
        let edges = tagbench_perturb::apply_rewired_ego(graph, &ego, &rewired);
        let index_edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|(s, d)| {
                (
                    graph.node_index(s).expect("surgery preserves ids"),
                    graph.node_index(d).expect("surgery preserves ids"),
                )
            })
            .collect();
        let ops = GraphOps::from_edges(graph.node_count(), &index_edges);
        let logits =
            tagbench_mpnn::forward_logits(params, &ops, features).map_err(CliError::runtime)?;
        if labels[v] == Some(tagbench_mpnn::predictions(&logits)[v]) {
            correct += 1;
        }
    }
    Ok(correct as f64 / splits.test.len().max(1) as f64)
}
