use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use tagbench_core::{derived_rng, EgoGraph, Split, SplitAssignment, TextAttributedGraph};

use crate::{
    render_prompt, DatasetProfile, PromptBundle, PromptError, PromptStyle, Result, TextContext,
};

/// One few-shot exemplar: the node text plus its ground-truth label name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub node_id: String,
    pub title: String,
    pub abstract_text: Option<String>,
    pub label_name: String,
}

/// Collect `n` training-split nodes the supplied predictor classifies
/// correctly from their zero-shot prompt, in seeded probe order.
///
/// `predict` receives the rendered zero-shot bundle and returns the parsed
/// label index (or `None` for an unparsable reply). Probing stops after
/// `probe_budget` attempts; running out before `n` correct predictions is an
/// error. Exemplars are fixed per experiment, not per target node.
pub fn build_few_shot_exemplars<F>(
    graph: &TextAttributedGraph,
    assignment: &SplitAssignment,
    n: usize,
    mut predict: F,
    seed: u64,
    profile: &DatasetProfile,
    context: TextContext,
    probe_budget: usize,
) -> Result<Vec<Exemplar>>
where
    F: FnMut(&PromptBundle) -> std::result::Result<Option<usize>, String>,
{
    if n == 0 {
        return Err(PromptError::Argument("need at least one exemplar".into()));
    }
    let mut train_ids: Vec<&str> = assignment.ids_with(Split::Train);
    if train_ids.is_empty() {
        return Err(PromptError::Argument("training split is empty".into()));
    }
    let mut rng = derived_rng("fewshot", "", seed);
    train_ids.shuffle(&mut rng);

    let style = PromptStyle::zero_shot();
    let mut exemplars = Vec::with_capacity(n);
    let mut probes = 0usize;
    for id in train_ids {
        if exemplars.len() == n {
            break;
        }
        if probes >= probe_budget {
            break;
        }
        let Some(node) = graph.node(id) else { continue };
        let Some(label) = node.label else { continue };
        if context == TextContext::Rich && node.body.is_none() {
            continue;
        }
        let ego = EgoGraph {
            target: node.clone(),
            hop1: Vec::new(),
            hop2: Vec::new(),
            intra_edges: Vec::new(),
            caps: profile.caps,
            seed,
        };
        let bundle = render_prompt(&ego, &style, profile, context, None)?;
        probes += 1;
        let predicted = predict(&bundle).map_err(PromptError::Probe)?;
        if predicted == Some(label) {
            exemplars.push(Exemplar {
                node_id: node.id.clone(),
                title: node.title.clone(),
                abstract_text: node.body.clone(),
                label_name: profile.label_name(label)?.to_string(),
            });
        }
    }

    if exemplars.len() < n {
        return Err(PromptError::ExemplarShortage {
            found: exemplars.len(),
            needed: n,
            budget: probe_budget,
        });
    }
    Ok(exemplars)
}
