use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tagbench_core::HopCaps;
use tagbench_perturb::{DropMode, DropSpec, NeighborStyle, PerturbationSpec, RewireKind};
use tagbench_prompt::{PromptStyle, TextContext};

use crate::CliError;

/// Raw configuration document. Validation happens in [`validate_config`],
/// which reports every problem at once rather than the first.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset: DatasetSection,
    #[serde(default)]
    pub split: Option<SplitSection>,
    #[serde(default)]
    pub experiment: Option<ExperimentSection>,
    #[serde(default)]
    pub backend: Option<BackendSection>,
    #[serde(default)]
    pub mpnn: Option<MpnnSection>,
    #[serde(default)]
    pub prepare: Option<PrepareSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub labels: PathBuf,
    /// Built-in profile name (`arxiv`, `cora`, `pubmed`, `products`) or
    /// `generic`.
    pub profile: String,
    #[serde(default)]
    pub hop1_max: Option<usize>,
    #[serde(default)]
    pub hop2_max: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub kind: String,
    #[serde(default)]
    pub train: Option<f64>,
    #[serde(default)]
    pub val: Option<f64>,
    #[serde(default)]
    pub test: Option<f64>,
    #[serde(default)]
    pub train_before: Option<i32>,
    #[serde(default)]
    pub val_years: Vec<i32>,
    #[serde(default)]
    pub test_years: Vec<i32>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub styles: Vec<String>,
    pub context: String,
    pub sample_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub attention_k: Option<usize>,
    #[serde(default)]
    pub few_shot_examples: Option<usize>,
    #[serde(default)]
    pub few_shot_probe_budget: Option<usize>,
    /// Ablation override for khop styles: `title_and_label`, `title_only`
    /// or `label_only`.
    #[serde(default)]
    pub neighbor_style: Option<String>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub perturbations: Vec<PerturbationEntry>,
}

/// One perturbation entry: a drop/add family (with one or many `p` values)
/// or a rewiring strategy.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationEntry {
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub p: Option<PValues>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub rewire: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PValues {
    One(f64),
    Many(Vec<f64>),
}

impl PValues {
    fn values(&self) -> Vec<f64> {
        match self {
            PValues::One(p) => vec![*p],
            PValues::Many(ps) => ps.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendSection {
    /// `majority_vote`, `keyword` or `remote`.
    pub kind: String,
    #[serde(default)]
    pub model_tag: Option<String>,
    #[serde(default)]
    pub fallback_label: Option<String>,
    #[serde(default)]
    pub keywords: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub credential_env: Option<String>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub concurrency: Option<usize>,
    #[serde(default)]
    pub timeout_ms: Option<u64>,
    #[serde(default)]
    pub retry_max_attempts: Option<u32>,
    #[serde(default)]
    pub retry_base_delay_ms: Option<u64>,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub max_output_tokens: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpnnSection {
    pub model: String,
    #[serde(default)]
    pub feature_dim: Option<usize>,
    #[serde(default)]
    pub feature_seed: Option<u64>,
    #[serde(default)]
    pub n_configs: Option<usize>,
    #[serde(default)]
    pub n_repeats: Option<usize>,
    #[serde(default)]
    pub max_epochs: Option<usize>,
    #[serde(default)]
    pub patience: Option<usize>,
    /// Optional rewiring strategy for a structural-sensitivity evaluation.
    #[serde(default)]
    pub rewire_eval: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareSection {
    pub corpus: PathBuf,
    pub year_min: i32,
    pub year_max: i32,
    pub n_seeds: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub hops: Option<u32>,
    #[serde(default)]
    pub search_budget: Option<usize>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub prior_nodes: Option<PathBuf>,
    #[serde(default)]
    pub prior_edges: Option<PathBuf>,
    #[serde(default)]
    pub prior_labels: Option<PathBuf>,
    #[serde(default)]
    pub cutoff_year: Option<i32>,
    /// Resolve references over HTTP instead of against the corpus file.
    #[serde(default)]
    pub http: Option<tagbench_pipeline::HttpResolverConfig>,
}

/// Fully validated experiment plan.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetSection,
    pub split: SplitPlan,
    pub styles: Vec<PromptStyle>,
    pub context: TextContext,
    pub sample_size: usize,
    pub seed: u64,
    pub few_shot_examples: usize,
    pub few_shot_probe_budget: usize,
    pub neighbor_style: Option<NeighborStyle>,
    pub output_dir: PathBuf,
    pub perturbations: Vec<PerturbationSpec>,
    pub backend: BackendSection,
    pub caps_override: Option<HopCaps>,
    pub config_digest: String,
}

#[derive(Debug, Clone)]
pub enum SplitPlan {
    Ratio {
        train: f64,
        val: f64,
        test: f64,
        seed: u64,
    },
    Year {
        train_before: i32,
        val_years: Vec<i32>,
        test_years: Vec<i32>,
    },
}

pub fn parse_config_file(path: &Path) -> Result<(ConfigFile, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(vec![format!("cannot read {}: {e}", path.display())]))?;
    let digest: String = {
        use sha2::{Digest, Sha256};
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    };
    let parsed: ConfigFile = toml::from_str(&text)
        .map_err(|e| CliError::Validation(vec![format!("config syntax: {e}")]))?;
    Ok((parsed, digest))
}

fn parse_style(
    s: &str,
    attention_k: usize,
    errors: &mut Vec<String>,
) -> Option<PromptStyle> {
    match s.parse::<PromptStyle>() {
        Ok(style) => match style.with_attention_k(attention_k) {
            Ok(style) => Some(style),
            Err(e) => {
                errors.push(format!("experiment.styles: {e}"));
                None
            }
        },
        Err(e) => {
            errors.push(format!("experiment.styles: {e}"));
            None
        }
    }
}

/// Resolve and validate an experiment configuration, collecting every
/// problem. `seed_override` and `out_override` come from the command line.
pub fn validate_config(
    path: &Path,
    seed_override: Option<u64>,
    out_override: Option<&Path>,
) -> Result<ExperimentConfig, CliError> {
    let (file, config_digest) = parse_config_file(path)?;
    let mut errors: Vec<String> = Vec::new();

    for (field, p) in [
        ("dataset.nodes", &file.dataset.nodes),
        ("dataset.edges", &file.dataset.edges),
        ("dataset.labels", &file.dataset.labels),
    ] {
        if !p.exists() {
            errors.push(format!("{field}: file {} does not exist", p.display()));
        }
    }

    let split = match &file.split {
        None => {
            errors.push("missing [split] section".into());
            None
        }
        Some(s) => match s.kind.as_str() {
            "ratio" => {
                let train = s.train.unwrap_or(0.0);
                let val = s.val.unwrap_or(0.0);
                let test = s.test.unwrap_or(0.0);
                for (name, v) in [("train", train), ("val", val), ("test", test)] {
                    if !(0.0..=1.0).contains(&v) {
                        errors.push(format!("split.{name}: fraction {v} outside [0, 1]"));
                    }
                }
                if train + val + test > 1.0 + 1e-12 {
                    errors.push(format!(
                        "split fractions sum to {} > 1",
                        train + val + test
                    ));
                }
                Some(SplitPlan::Ratio {
                    train,
                    val,
                    test,
                    seed: s.seed.unwrap_or(0),
                })
            }
            "year" => {
                if s.train_before.is_none() {
                    errors.push("split.train_before required for kind = \"year\"".into());
                }
                if s.val_years.iter().any(|y| s.test_years.contains(y)) {
                    errors.push("split.val_years and split.test_years overlap".into());
                }
                Some(SplitPlan::Year {
                    train_before: s.train_before.unwrap_or(0),
                    val_years: s.val_years.clone(),
                    test_years: s.test_years.clone(),
                })
            }
            other => {
                errors.push(format!("split.kind: unknown kind {other:?}"));
                None
            }
        },
    };

    let Some(experiment) = &file.experiment else {
        errors.push("missing [experiment] section".into());
        return Err(CliError::Validation(errors));
    };

    let attention_k = experiment.attention_k.unwrap_or(tagbench_prompt::DEFAULT_ATTENTION_K);
    if experiment.attention_k == Some(0) {
        errors.push("experiment.attention_k: must be at least 1".into());
    }
    let styles: Vec<PromptStyle> = experiment
        .styles
        .iter()
        .filter_map(|s| parse_style(s, attention_k.max(1), &mut errors))
        .collect();
    if experiment.styles.is_empty() {
        errors.push("experiment.styles: at least one style required".into());
    }

    let context = match experiment.context.as_str() {
        "rich" => TextContext::Rich,
        "scarce" => TextContext::Scarce,
        other => {
            errors.push(format!(
                "experiment.context: expected \"rich\" or \"scarce\", got {other:?}"
            ));
            TextContext::Scarce
        }
    };

    let neighbor_style = match experiment.neighbor_style.as_deref() {
        None => None,
        Some("title_and_label") => Some(NeighborStyle::TitleAndLabel),
        Some("title_only") => Some(NeighborStyle::TitleOnly),
        Some("label_only") => Some(NeighborStyle::LabelOnly),
        Some(other) => {
            errors.push(format!(
                "experiment.neighbor_style: unknown style {other:?}"
            ));
            None
        }
    };

    let mut perturbations = Vec::new();
    for (i, entry) in experiment.perturbations.iter().enumerate() {
        match (&entry.mode, &entry.rewire) {
            (Some(mode), None) => {
                let mode = match mode.as_str() {
                    "drop_same" => Some(DropMode::DropSame),
                    "drop_different" => Some(DropMode::DropDifferent),
                    "drop_random" => Some(DropMode::DropRandom),
                    "add_same" => Some(DropMode::AddSame),
                    "add_different" => Some(DropMode::AddDifferent),
                    "add_random" => Some(DropMode::AddRandom),
                    other => {
                        errors.push(format!(
                            "experiment.perturbations[{i}].mode: unknown mode {other:?}"
                        ));
                        None
                    }
                };
                let ps = match &entry.p {
                    Some(p) => p.values(),
                    None => {
                        errors.push(format!(
                            "experiment.perturbations[{i}].p: required for drop/add modes"
                        ));
                        vec![]
                    }
                };
                for &p in &ps {
                    if !(0.0..=1.0).contains(&p) {
                        errors.push(format!(
                            "experiment.perturbations[{i}].p: {p} outside [0, 1]"
                        ));
                    }
                }
                if let Some(mode) = mode {
                    let seed = entry.seed.unwrap_or(experiment.seed);
                    for p in ps {
                        perturbations.push(PerturbationSpec::Drop(DropSpec::new(mode, p, seed)));
                    }
                }
            }
            (None, Some(rewire)) => match rewire.as_str() {
                "random" => perturbations.push(PerturbationSpec::Rewire {
                    rewire: RewireKind::Random,
                }),
                "extreme" => perturbations.push(PerturbationSpec::Rewire {
                    rewire: RewireKind::Extreme,
                }),
                "path" => perturbations.push(PerturbationSpec::Rewire {
                    rewire: RewireKind::Path,
                }),
                other => errors.push(format!(
                    "experiment.perturbations[{i}].rewire: unknown strategy {other:?}"
                )),
            },
            _ => errors.push(format!(
                "experiment.perturbations[{i}]: exactly one of `mode` or `rewire` required"
            )),
        }
    }

    let backend = match &file.backend {
        None => {
            errors.push("missing [backend] section".into());
            None
        }
        Some(b) => {
            match b.kind.as_str() {
                "majority_vote" | "keyword" | "remote" => {}
                other => errors.push(format!("backend.kind: unknown kind {other:?}")),
            }
            if b.kind == "remote" {
                if b.endpoint.is_none() {
                    errors.push("backend.endpoint: required for remote backends".into());
                }
                if b.credential_env.is_none() {
                    errors.push("backend.credential_env: required for remote backends".into());
                }
            }
            if b.kind == "keyword" && b.keywords.is_none() {
                errors.push("backend.keywords: required for the keyword oracle".into());
            }
            if let Some(t) = b.temperature {
                if t < 0.0 {
                    errors.push(format!("backend.temperature: {t} is negative"));
                }
            }
            Some(b.clone())
        }
    };

    let caps_override = match (file.dataset.hop1_max, file.dataset.hop2_max) {
        (None, None) => None,
        (h1, h2) => Some(HopCaps::new(h1.unwrap_or(20), h2.unwrap_or(5))),
    };

    let output_dir = out_override
        .map(|p| p.to_path_buf())
        .or_else(|| experiment.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    if !errors.is_empty() {
        return Err(CliError::Validation(errors));
    }

    Ok(ExperimentConfig {
        dataset: file.dataset,
        split: split.expect("split validated"),
        styles,
        context,
        sample_size: experiment.sample_size,
        seed: seed_override.unwrap_or(experiment.seed),
        few_shot_examples: experiment.few_shot_examples.unwrap_or(2),
        few_shot_probe_budget: experiment.few_shot_probe_budget.unwrap_or(20),
        neighbor_style,
        output_dir,
        perturbations,
        backend: backend.expect("backend validated"),
        caps_override,
        config_digest,
    })
}
