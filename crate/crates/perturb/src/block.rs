use tagbench_core::{EgoGraph, Split};
use tagbench_prompt::template::{self, fill};
use tagbench_prompt::{DatasetProfile, TextContext};

use crate::{NeighborStyle, PerturbError, Result};

/// Render the per-neighbor block of the label-information ablation.
///
/// Line formats match the prompt-engine templates. Label lines follow the
/// same leak rule as everywhere else: only train/validation neighbors show
/// labels. Under `LabelOnly`, a train/validation neighbor without a label
/// cannot be rendered at all and is a data error.
pub fn render_neighbor_block(
    ego: &EgoGraph,
    style: NeighborStyle,
    profile: &DatasetProfile,
) -> Result<String> {
    let mut out = String::new();
    for (i, node) in ego.neighbors().enumerate() {
        let number = (i + 1).to_string();
        if matches!(style, NeighborStyle::TitleAndLabel | NeighborStyle::TitleOnly) {
            out.push_str(&fill(
                template::NEIGHBOR_TITLE,
                &[("index", &number), ("title", &node.title)],
            ));
        }
        if matches!(style, NeighborStyle::TitleAndLabel | NeighborStyle::LabelOnly) {
            let visible = matches!(node.split, Split::Train | Split::Validation);
            match (visible, node.label) {
                (true, Some(index)) => {
                    let name = profile.label_name(index)?;
                    out.push_str(&fill(template::NEIGHBOR_LABEL, &[("label", name)]));
                }
                (true, None) if style == NeighborStyle::LabelOnly => {
                    return Err(PerturbError::Data(format!(
                        "neighbor {} has no label to render",
                        node.id
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Full ablation prompt: target block, neighbor block, answer suffix.
pub fn render_ablation_prompt(
    ego: &EgoGraph,
    style: NeighborStyle,
    profile: &DatasetProfile,
    context: TextContext,
) -> Result<String> {
    let target = match context {
        TextContext::Rich => {
            let body = ego.target.body.as_deref().ok_or_else(|| {
                PerturbError::Prompt(tagbench_prompt::PromptError::MissingBody(
                    ego.target.id.clone(),
                ))
            })?;
            fill(
                template::TARGET_RICH,
                &[("abstract", body), ("title", &ego.target.title)],
            )
        }
        TextContext::Scarce => fill(template::TARGET_SCARCE, &[("title", &ego.target.title)]),
    };
    Ok(format!(
        "{target}{}{}",
        render_neighbor_block(ego, style, profile)?,
        template::SUFFIX_ANSWER
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tagbench_prompt::testkit::{arxiv_profile, fixture_ego};

    #[test]
    fn label_only_emits_only_label_lines() {
        let ego = fixture_ego();
        let profile = arxiv_profile();
        let block = render_neighbor_block(&ego, NeighborStyle::LabelOnly, &profile).unwrap();
        // three train/validation neighbors in the fixture
        assert_eq!(block.matches("Label: ").count(), 3);
        assert_eq!(block.matches("title:").count(), 0);
    }

    #[test]
    fn title_only_emits_no_labels() {
        let ego = fixture_ego();
        let profile = arxiv_profile();
        let block = render_neighbor_block(&ego, NeighborStyle::TitleOnly, &profile).unwrap();
        assert_eq!(block.matches("Label: ").count(), 0);
        assert_eq!(block.matches("title:").count(), ego.neighbor_count());
    }

    #[test]
    fn title_and_label_matches_frozen_render() {
        let ego = fixture_ego();
        let profile = arxiv_profile();
        let block =
            render_neighbor_block(&ego, NeighborStyle::TitleAndLabel, &profile).unwrap();
        let expected = "Paper 1 title: Spectral Methods for Conservation Laws\n\
                        Label: cs.NA\n\
                        Paper 2 title: A Survey of Finite Element Preconditioners\n\
                        Paper 3 title: Multigrid Solvers on Unstructured Grids\n\
                        Label: cs.MS\n\
                        Paper 4 title: Parallel Sparse Matrix Kernels\n\
                        Paper 5 title: Error Analysis of Runge-Kutta Schemes\n\
                        Label: cs.CE\n";
        assert_eq!(block, expected);
    }

    #[test]
    fn ablation_prompt_carries_suffix() {
        let ego = fixture_ego();
        let profile = arxiv_profile();
        let text =
            render_ablation_prompt(&ego, NeighborStyle::LabelOnly, &profile, TextContext::Scarce)
                .unwrap();
        assert!(text.starts_with("Title: "));
        assert!(text.ends_with("Do not give any reasoning or logic for your answer. \nAnswer: \n\n"));
    }
}
