use serde::{Deserialize, Serialize};
use tagbench_core::{local_homophily_ratio, EgoGraph, NodeRecord, Split};

use crate::template::{self, fill};
use crate::{
    DatasetProfile, Exemplar, PromptError, PromptStyle, Result, StyleKind, TextContext,
};

/// A rendered prompt: the system text plus one user stage, or two for
/// attention styles once the ranking-dependent second stage is attached.
///
/// Carries provenance needed downstream: which neighbors were included and
/// the local homophily ratio of the rendered ego (when defined).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_text: String,
    pub stages: Vec<String>,
    pub style: PromptStyle,
    pub target_id: String,
    pub hop1_ids: Vec<String>,
    pub hop2_ids: Vec<String>,
    pub homophily: Option<f64>,
    pub suppress_reasoning: bool,
    /// True between rendering an attention stage 1 and attaching stage 2.
    pub awaiting_attention_stage: bool,
}

impl PromptBundle {
    /// Attach the ranking-dependent prediction stage of an attention style.
    pub fn push_attention_stage2(&mut self, stage: String) {
        debug_assert!(self.awaiting_attention_stage);
        self.stages.push(stage);
        self.awaiting_attention_stage = false;
    }

    /// Structural invariants of a completed bundle.
    pub fn check_invariants(&self) -> Result<()> {
        let expected_stages = if self.style.kind().is_attention() { 2 } else { 1 };
        if self.awaiting_attention_stage {
            return Err(PromptError::Argument(
                "bundle still awaiting attention stage 2".into(),
            ));
        }
        if self.stages.len() != expected_stages {
            return Err(PromptError::Argument(format!(
                "style {} expects {} stage(s), bundle has {}",
                self.style,
                expected_stages,
                self.stages.len()
            )));
        }
        let last = self.stages.last().expect("at least one stage");
        if self.suppress_reasoning != last.ends_with(template::SUFFIX_ANSWER) {
            return Err(PromptError::Argument(
                "suppress-reasoning flag disagrees with final stage suffix".into(),
            ));
        }
        Ok(())
    }
}

/// The stored system prompt, verbatim.
pub fn render_system_prompt(profile: &DatasetProfile) -> String {
    profile.system_prompt.clone()
}

fn target_block(target: &NodeRecord, context: TextContext) -> Result<String> {
    match context {
        TextContext::Rich => {
            let body = target
                .body
                .as_deref()
                .ok_or_else(|| PromptError::MissingBody(target.id.clone()))?;
            Ok(fill(
                template::TARGET_RICH,
                &[("abstract", body), ("title", &target.title)],
            ))
        }
        TextContext::Scarce => Ok(fill(template::TARGET_SCARCE, &[("title", &target.title)])),
    }
}

/// Label line for a neighbor, or `None` when the label must not be shown.
/// Labels are only ever emitted for train/validation neighbors.
fn label_line(neighbor: &NodeRecord, profile: &DatasetProfile) -> Result<Option<String>> {
    if !matches!(neighbor.split, Split::Train | Split::Validation) {
        return Ok(None);
    }
    let Some(index) = neighbor.label else {
        return Ok(None);
    };
    let name = profile.label_name(index)?;
    Ok(Some(fill(template::NEIGHBOR_LABEL, &[("label", name)])))
}

/// Bracketed list of the enumeration numbers of included neighbors adjacent
/// to `id` through the ego's edges, ascending. The target carries no number
/// and is therefore never listed.
fn linked_numbers(ego: &EgoGraph, id: &str) -> String {
    let mut numbers: Vec<usize> = ego
        .adjacent_ids(id)
        .into_iter()
        .filter_map(|adj| ego.enumeration_number(adj))
        .collect();
    numbers.sort_unstable();
    numbers.dedup();
    let inner = numbers
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    format!("[{inner}]")
}

fn graph_structured_block(
    ego: &EgoGraph,
    style: &PromptStyle,
    profile: &DatasetProfile,
) -> Result<String> {
    let mut out = String::new();
    let hops: &[(u8, &[NodeRecord])] = &[(1, &ego.hop1), (2, &ego.hop2)];
    let mut number = 0usize;
    for (hop, nodes) in hops {
        if *hop > style.hops() {
            break;
        }
        out.push_str(&fill(template::HOP_HEADER, &[("hop", &hop.to_string())]));
        for node in *nodes {
            number += 1;
            out.push_str(&fill(
                template::NEIGHBOR_TITLE,
                &[("index", &number.to_string()), ("title", &node.title)],
            ));
            if style.kind().includes_labels() {
                if let Some(line) = label_line(node, profile)? {
                    out.push_str(&line);
                }
            }
            out.push_str(&fill(
                template::NEIGHBOR_LINKS,
                &[("links", &linked_numbers(ego, &node.id))],
            ));
        }
    }
    Ok(out)
}

fn linearized_block(
    ego: &EgoGraph,
    style: &PromptStyle,
    profile: &DatasetProfile,
) -> Result<String> {
    let mut out = String::new();
    let hops: &[&[NodeRecord]] = &[&ego.hop1, &ego.hop2];
    for (i, nodes) in hops.iter().enumerate() {
        if i as u8 + 1 > style.hops() {
            break;
        }
        for node in *nodes {
            out.push_str(&fill(template::LINEAR_TITLE, &[("title", &node.title)]));
            if style.kind().includes_labels() {
                if let Some(line) = label_line(node, profile)? {
                    out.push_str(&line);
                }
            }
        }
    }
    Ok(out)
}

fn attention_stage1(ego: &EgoGraph, style: &PromptStyle) -> String {
    let mut out = fill(
        template::ATTENTION_EXTRACT,
        &[
            ("title", &ego.target.title),
            ("k", &style.attention_k().to_string()),
        ],
    );
    for (i, node) in ego.hop1.iter().enumerate() {
        out.push_str(&fill(
            template::ATTENTION_RANK_LINE,
            &[("index", &(i + 1).to_string()), ("title", &node.title)],
        ));
    }
    out
}

fn exemplar_block(exemplars: &[Exemplar], context: TextContext) -> Result<String> {
    let mut out = String::new();
    for ex in exemplars {
        match context {
            TextContext::Rich => {
                let body = ex
                    .abstract_text
                    .as_deref()
                    .ok_or_else(|| PromptError::MissingBody(format!("exemplar {}", ex.title)))?;
                out.push_str(&fill(
                    template::FEWSHOT_EXAMPLE_RICH,
                    &[
                        ("abstract", body),
                        ("title", &ex.title),
                        ("label", &ex.label_name),
                    ],
                ));
            }
            TextContext::Scarce => out.push_str(&fill(
                template::FEWSHOT_EXAMPLE_SCARCE,
                &[("title", &ex.title), ("label", &ex.label_name)],
            )),
        }
    }
    Ok(out)
}

/// Render the user stage(s) for a style.
///
/// For attention styles this produces stage 1 (the ranking request); the
/// caller parses the ranking from the reply, renders stage 2 via
/// [`render_attention_stage2`] and attaches it with
/// [`PromptBundle::push_attention_stage2`].
pub fn render_prompt(
    ego: &EgoGraph,
    style: &PromptStyle,
    profile: &DatasetProfile,
    context: TextContext,
    few_shot_exemplars: Option<&[Exemplar]>,
) -> Result<PromptBundle> {
    let target = target_block(&ego.target, context)?;
    let stage = match style.kind() {
        StyleKind::ZeroShot => format!("{target}{}", template::SUFFIX_ANSWER),
        StyleKind::ZeroShotCot => format!("{target}{}", template::SUFFIX_COT),
        StyleKind::FewShot => {
            let exemplars = few_shot_exemplars
                .filter(|e| !e.is_empty())
                .ok_or(PromptError::MissingExemplars)?;
            format!(
                "{}{target}{}",
                exemplar_block(exemplars, context)?,
                template::SUFFIX_ANSWER
            )
        }
        StyleKind::KhopTitle | StyleKind::KhopTitleLabel => format!(
            "{target}{}{}",
            graph_structured_block(ego, style, profile)?,
            template::SUFFIX_ANSWER
        ),
        StyleKind::LinearizedKhopTitle | StyleKind::LinearizedKhopTitleLabel => format!(
            "{target}{}{}",
            linearized_block(ego, style, profile)?,
            template::SUFFIX_ANSWER
        ),
        StyleKind::KhopAttention | StyleKind::LinearizedKhopAttention => {
            attention_stage1(ego, style)
        }
    };

    Ok(PromptBundle {
        system_text: render_system_prompt(profile),
        stages: vec![stage],
        style: *style,
        target_id: ego.target.id.clone(),
        hop1_ids: ego.hop1.iter().map(|n| n.id.clone()).collect(),
        hop2_ids: ego.hop2.iter().map(|n| n.id.clone()).collect(),
        homophily: local_homophily_ratio(ego).ok(),
        suppress_reasoning: style.kind() != StyleKind::ZeroShotCot,
        awaiting_attention_stage: style.kind().is_attention(),
    })
}

/// Render the attention prediction stage over the selected hop-1 neighbors,
/// in the given order. Linearized attention omits the importance header.
pub fn render_attention_stage2(
    ego: &EgoGraph,
    selected_hop1_indices: &[usize],
    profile: &DatasetProfile,
    context: TextContext,
    style: &PromptStyle,
) -> Result<String> {
    let _ = profile;
    if selected_hop1_indices.len() > style.attention_k() {
        return Err(PromptError::Argument(format!(
            "{} neighbors selected but attention_k is {}",
            selected_hop1_indices.len(),
            style.attention_k()
        )));
    }
    for &i in selected_hop1_indices {
        if i >= ego.hop1.len() {
            return Err(PromptError::Argument(format!(
                "selected index {i} outside hop-1 list of {}",
                ego.hop1.len()
            )));
        }
    }
    let mut out = target_block(&ego.target, context)?;
    if !style.kind().is_linearized() {
        out.push_str(template::ATTENTION_HEADER);
    }
    for &i in selected_hop1_indices {
        out.push_str(&fill(
            template::LINEAR_TITLE,
            &[("title", &ego.hop1[i].title)],
        ));
    }
    out.push_str(template::SUFFIX_ANSWER);
    Ok(out)
}
