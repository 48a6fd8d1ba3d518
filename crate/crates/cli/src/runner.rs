use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use tagbench_analysis::{
    build_report, read_records, ExperimentReport, PredictionRecord, ReportMeta,
};
use tagbench_backend::{
    parse_answer, DecodingParams, EgoContext, Predictor, PredictorRequest,
};
use tagbench_core::{
    extract_ego_graph, local_homophily_ratio, sample_test_nodes, split_by_ratio, split_by_year,
    TextAttributedGraph,
};
use tagbench_perturb::{
    perturb_neighbors, render_ablation_prompt, rewire, NeighborStyle, PerturbationSpec,
};
use tagbench_prompt::{
    build_few_shot_exemplars, render_attention_stage2, render_prompt, render_system_prompt,
    DatasetProfile, Exemplar, PromptBundle, PromptStyle, StyleKind, TextContext,
};

use crate::backend_setup::build_backend;
use crate::config::{ExperimentConfig, SplitPlan};
use crate::{CliError, Result};

/// Everything needed to execute the crossed experiment axes.
pub struct PreparedExperiment {
    pub graph: TextAttributedGraph,
    pub profile: DatasetProfile,
    pub styles: Vec<PromptStyle>,
    pub context: TextContext,
    pub perturbations: Vec<PerturbationSpec>,
    pub targets: Vec<String>,
    pub backend: Arc<dyn Predictor>,
    pub model_tag: String,
    pub decoding: DecodingParams,
    pub exemplars: Option<Vec<Exemplar>>,
    pub neighbor_style: Option<NeighborStyle>,
    pub seed: u64,
    pub concurrency: usize,
    pub dataset_name: String,
}

/// Progress accounting for one run, persisted as `manifest.json`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub total_units: usize,
    pub resumed: usize,
    pub dispatched: usize,
    pub succeeded: usize,
    pub failed: usize,
    /// work key -> error class
    pub failures: BTreeMap<String, String>,
}

pub struct RunOutcome {
    pub records: Vec<PredictionRecord>,
    pub manifest: RunManifest,
    pub report: ExperimentReport,
}

#[derive(Clone)]
struct WorkUnit {
    target: String,
    style: PromptStyle,
    perturbation: Option<PerturbationSpec>,
}

fn unit_key(unit: &WorkUnit, context: TextContext, stage: u8) -> String {
    format!(
        "{}|{}|{}|{}|{}",
        unit.target,
        unit.style,
        context,
        unit.perturbation
            .map(|p| p.to_string())
            .unwrap_or_else(|| "none".into()),
        stage
    )
}

struct UnitFailure {
    class: &'static str,
    message: String,
}

fn fail(class: &'static str, e: impl std::fmt::Display) -> UnitFailure {
    UnitFailure {
        class,
        message: e.to_string(),
    }
}

fn execute_unit(
    prepared: &PreparedExperiment,
    unit: &WorkUnit,
) -> std::result::Result<PredictionRecord, UnitFailure> {
    let caps = prepared.profile.caps;
    let ego = extract_ego_graph(&prepared.graph, &unit.target, caps, prepared.seed)
        .map_err(|e| fail("ego", e))?;

    let ego = match &unit.perturbation {
        None => ego,
        Some(PerturbationSpec::Drop(spec)) => {
            perturb_neighbors(&ego, spec, &prepared.graph).map_err(|e| fail("perturb", e))?
        }
        Some(PerturbationSpec::Rewire { rewire: kind }) => {
            rewire(&ego, *kind, prepared.seed).map_err(|e| fail("perturb", e))?
        }
    };

    let homophily = local_homophily_ratio(&ego).ok();
    let ablation = prepared.neighbor_style.filter(|_| {
        matches!(
            unit.style.kind(),
            StyleKind::KhopTitle | StyleKind::KhopTitleLabel
        )
    });
    let mut bundle = match ablation {
        Some(neighbor_style) => {
            let text =
                render_ablation_prompt(&ego, neighbor_style, &prepared.profile, prepared.context)
                    .map_err(|e| fail("render", e))?;
            PromptBundle {
                system_text: render_system_prompt(&prepared.profile),
                stages: vec![text],
                style: unit.style,
                target_id: ego.target.id.clone(),
                hop1_ids: ego.hop1.iter().map(|n| n.id.clone()).collect(),
                hop2_ids: ego.hop2.iter().map(|n| n.id.clone()).collect(),
                homophily,
                suppress_reasoning: true,
                awaiting_attention_stage: false,
            }
        }
        None => render_prompt(
            &ego,
            &unit.style,
            &prepared.profile,
            prepared.context,
            prepared.exemplars.as_deref(),
        )
        .map_err(|e| fail("render", e))?,
    };

    let context_for_oracles = EgoContext::from_ego(&ego, &prepared.profile.label_vocab);
    let system_text = bundle.system_text.clone();
    let request = move |texts: Vec<String>| {
        let mut req =
            PredictorRequest::new(&prepared.model_tag, system_text.clone(), texts);
        req.decoding = prepared.decoding;
        req.with_ego_context(context_for_oracles.clone())
    };

    let (final_text, stage) = if bundle.awaiting_attention_stage {
        let stage1 = bundle.stages[0].clone();
        let ranking_reply = prepared
            .backend
            .complete(&request(vec![stage1]))
            .map_err(|e| fail("backend", e))?;
        let selected = tagbench_prompt::parse_ranked_list(
            &ranking_reply.text,
            ego.hop1.len(),
            unit.style.attention_k(),
        )
        .unwrap_or_else(|_| {
            // unparsable ranking: first min(k, |hop1|) neighbors
            (0..unit.style.attention_k().min(ego.hop1.len())).collect()
        });
        let stage2 = render_attention_stage2(
            &ego,
            &selected,
            &prepared.profile,
            prepared.context,
            &unit.style,
        )
        .map_err(|e| fail("render", e))?;
        bundle.push_attention_stage2(stage2.clone());
        let reply = prepared
            .backend
            .complete(&request(vec![stage2]))
            .map_err(|e| fail("backend", e))?;
        (reply.text, 2u8)
    } else {
        let reply = prepared
            .backend
            .complete(&request(vec![bundle.stages[0].clone()]))
            .map_err(|e| fail("backend", e))?;
        (reply.text, 1u8)
    };

    let parsed = parse_answer(&final_text, &prepared.profile);
    let truth = prepared
        .graph
        .node(&unit.target)
        .and_then(|n| n.label);
    let correct = match (parsed.label(), truth) {
        (Some(p), Some(t)) => p == t,
        _ => false,
    };

    Ok(PredictionRecord {
        node_id: unit.target.clone(),
        style: unit.style,
        context: prepared.context,
        perturbation: unit.perturbation,
        stage,
        raw_text: final_text,
        parsed,
        correct,
        homophily,
    })
}

/// Build the prepared experiment from a validated configuration: load the
/// graph, stamp splits, sample targets, build the backend and exemplars.
pub fn prepare_experiment(config: &ExperimentConfig) -> Result<PreparedExperiment> {
    let (mut graph, _) = tagbench_core::load_graph(
        &config.dataset.nodes,
        &config.dataset.edges,
        &config.dataset.labels,
    )
    .map_err(CliError::runtime)?;

    let mut profile = match config.dataset.profile.as_str() {
        "generic" => DatasetProfile::generic(
            "generic",
            graph.label_vocab().to_vec(),
            config.caps_override.unwrap_or(tagbench_core::HopCaps::new(20, 5)),
        ),
        name => DatasetProfile::builtin(name, graph.label_vocab().to_vec()).ok_or_else(|| {
            CliError::Runtime(format!("unknown dataset profile {name:?}"))
        })?,
    };
    if let Some(caps) = config.caps_override {
        profile.caps = caps;
    }
    if profile.label_vocab != graph.label_vocab() {
        return Err(CliError::Runtime(format!(
            "profile {} vocabulary does not match the dataset labels file",
            profile.name
        )));
    }
    profile.validate().map_err(CliError::runtime)?;

    let assignment = match &config.split {
        SplitPlan::Ratio {
            train,
            val,
            test,
            seed,
        } => split_by_ratio(&graph, (*train, *val, *test), *seed).map_err(CliError::runtime)?,
        SplitPlan::Year {
            train_before,
            val_years,
            test_years,
        } => {
            let val = val_years.iter().copied().collect();
            let test = test_years.iter().copied().collect();
            split_by_year(&graph, *train_before, &val, &test).map_err(CliError::runtime)?
        }
    };
    graph.apply_split(&assignment).map_err(CliError::runtime)?;

    let targets = sample_test_nodes(&assignment, config.sample_size, config.seed)
        .map_err(CliError::runtime)?;

    std::fs::create_dir_all(&config.output_dir).map_err(CliError::runtime)?;
    let (backend, model_tag, decoding) =
        build_backend(&config.backend, &profile, &config.output_dir)?;

    let needs_exemplars = config
        .styles
        .iter()
        .any(|s| s.kind() == StyleKind::FewShot);
    let exemplars = if needs_exemplars {
        let predict = |bundle: &PromptBundle| {
            let mut req = PredictorRequest::new(
                &model_tag,
                bundle.system_text.clone(),
                bundle.stages.clone(),
            );
            req.decoding = decoding;
            // zero-shot probes carry an empty neighborhood context
            req.ego_context = Some(EgoContext {
                target_id: bundle.target_id.clone(),
                neighbor_label_names: Vec::new(),
            });
            match backend.complete(&req) {
                Ok(reply) => Ok(parse_answer(&reply.text, &profile).label()),
                Err(e) => Err(e.to_string()),
            }
        };
        Some(
            build_few_shot_exemplars(
                &graph,
                &assignment,
                config.few_shot_examples,
                predict,
                config.seed,
                &profile,
                config.context,
                config.few_shot_probe_budget,
            )
            .map_err(CliError::runtime)?,
        )
    } else {
        None
    };

    Ok(PreparedExperiment {
        dataset_name: profile.name.clone(),
        graph,
        profile,
        styles: config.styles.clone(),
        context: config.context,
        perturbations: config.perturbations.clone(),
        targets,
        backend,
        model_tag,
        decoding,
        exemplars,
        neighbor_style: config.neighbor_style,
        seed: config.seed,
        concurrency: config.backend.concurrency.unwrap_or(4).max(1),
    })
}

/// Validate-load-run in one call.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    let prepared = prepare_experiment(config)?;
    run_prepared(&prepared, &config.output_dir, &config.config_digest)
}

/// Execute the crossed axes `styles x perturbations x targets`, streaming
/// records to `<out>/records.jsonl` in deterministic unit order, then build
/// and persist the report.
///
/// An existing records file is treated as the committed prefix of the same
/// experiment: its work keys are skipped, so an interrupted run resumes
/// without duplicates.
pub fn run_prepared(
    prepared: &PreparedExperiment,
    output_dir: &Path,
    config_digest: &str,
) -> Result<RunOutcome> {
    let started_at = chrono::Utc::now().to_rfc3339();
    std::fs::create_dir_all(output_dir).map_err(CliError::runtime)?;
    let records_path = output_dir.join("records.jsonl");

    // crossed axes, deterministic order
    let mut units = Vec::new();
    let perturbations: Vec<Option<PerturbationSpec>> = if prepared.perturbations.is_empty() {
        vec![None]
    } else {
        prepared.perturbations.iter().copied().map(Some).collect()
    };
    for style in &prepared.styles {
        for perturbation in &perturbations {
            for target in &prepared.targets {
                units.push(WorkUnit {
                    target: target.clone(),
                    style: *style,
                    perturbation: *perturbation,
                });
            }
        }
    }

    let existing: Vec<PredictionRecord> = if records_path.exists() {
        read_records(&records_path).map_err(CliError::runtime)?
    } else {
        Vec::new()
    };
    let done: HashSet<String> = existing.iter().map(|r| r.work_key()).collect();
    let pending: Vec<WorkUnit> = units
        .iter()
        .filter(|u| {
            let stage = if u.style.kind().is_attention() { 2 } else { 1 };
            !done.contains(&unit_key(u, prepared.context, stage))
        })
        .cloned()
        .collect();

    let mut manifest = RunManifest {
        config_digest: config_digest.to_string(),
        total_units: units.len(),
        resumed: units.len() - pending.len(),
        dispatched: pending.len(),
        ..RunManifest::default()
    };

    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&records_path)
        .map_err(CliError::runtime)?;

    // bounded worker pool; one writer consumes results in sequence order
    let cursor = AtomicUsize::new(0);
    let (sender, receiver) = mpsc::channel::<(usize, std::result::Result<PredictionRecord, UnitFailure>)>();
    std::thread::scope(|scope| -> Result<()> {
        let workers = prepared.concurrency.min(pending.len().max(1));
        for _ in 0..workers {
            let sender = sender.clone();
            let cursor = &cursor;
            let pending = &pending;
            scope.spawn(move || loop {
                let i = cursor.fetch_add(1, Ordering::SeqCst);
                if i >= pending.len() {
                    break;
                }
                let unit = &pending[i];
                let outcome = execute_unit(prepared, unit);
                if sender.send((i, outcome)).is_err() {
                    break;
                }
            });
        }
        drop(sender);

        let mut buffer: BTreeMap<usize, std::result::Result<PredictionRecord, UnitFailure>> =
            BTreeMap::new();
        let mut next = 0usize;
        let flush = |buffer: &mut BTreeMap<usize, std::result::Result<PredictionRecord, UnitFailure>>,
                         next: &mut usize,
                         manifest: &mut RunManifest,
                         file: &mut std::fs::File|
         -> Result<()> {
            while let Some(outcome) = buffer.remove(next) {
                match outcome {
                    Ok(record) => {
                        let line = serde_json::to_string(&record).expect("record serializes");
                        writeln!(file, "{line}").map_err(CliError::runtime)?;
                        manifest.succeeded += 1;
                    }
                    Err(failure) => {
                        let unit = &pending[*next];
                        let stage = if unit.style.kind().is_attention() { 2 } else { 1 };
                        manifest.failed += 1;
                        manifest.failures.insert(
                            unit_key(unit, prepared.context, stage),
                            format!("{}: {}", failure.class, failure.message),
                        );
                    }
                }
                *next += 1;
            }
            Ok(())
        };
        for (seq, outcome) in receiver {
            buffer.insert(seq, outcome);
            flush(&mut buffer, &mut next, &mut manifest, &mut file)?;
        }
        flush(&mut buffer, &mut next, &mut manifest, &mut file)?;
        Ok(())
    })?;
    file.flush().map_err(CliError::runtime)?;

    // manifest lands on disk before any report post-processing can fail
    let manifest_path = output_dir.join("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )
    .map_err(CliError::runtime)?;

    let records = read_records(&records_path).map_err(CliError::runtime)?;
    if records.is_empty() {
        return Err(CliError::Runtime(
            "run produced no records (all units failed)".into(),
        ));
    }
    let meta = ReportMeta {
        dataset: prepared.dataset_name.clone(),
        model_tag: prepared.model_tag.clone(),
        seed: prepared.seed,
        config_digest: config_digest.to_string(),
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
        generator_version: tagbench_core::GENERATOR_VERSION.to_string(),
    };
    let report = build_report(&records, meta).map_err(CliError::runtime)?;
    std::fs::write(
        output_dir.join("report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(CliError::runtime)?;
    tagbench_analysis::write_curve_tsvs(&report.curves, output_dir).map_err(CliError::runtime)?;

    Ok(RunOutcome {
        records,
        manifest,
        report,
    })
}
