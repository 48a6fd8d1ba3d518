use serde::{Deserialize, Serialize};
use tagbench_core::EgoGraph;

/// Decoding parameters sent with every remote request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodingParams {
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl Default for DecodingParams {
    fn default() -> Self {
        Self {
            temperature: 0.0,
            max_output_tokens: 500,
        }
    }
}

/// Structured ego context handed to oracle backends alongside the rendered
/// text; the majority-vote ablation is defined over labels, not over text
/// scraping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoContext {
    pub target_id: String,
    /// Label names of the labeled included neighbors, both hops.
    pub neighbor_label_names: Vec<String>,
}

impl EgoContext {
    pub fn from_ego(ego: &EgoGraph, label_vocab: &[String]) -> Self {
        Self {
            target_id: ego.target.id.clone(),
            neighbor_label_names: ego
                .neighbors()
                .filter_map(|n| n.label)
                .filter_map(|l| label_vocab.get(l).cloned())
                .collect(),
        }
    }
}

/// One prediction request: staged user texts executed in order under a
/// single system prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorRequest {
    pub model_tag: String,
    pub system_text: String,
    pub user_texts: Vec<String>,
    pub decoding: DecodingParams,
    #[serde(default)]
    pub ego_context: Option<EgoContext>,
}

impl PredictorRequest {
    pub fn new(model_tag: &str, system_text: String, user_texts: Vec<String>) -> Self {
        Self {
            model_tag: model_tag.to_string(),
            system_text,
            user_texts,
            decoding: DecodingParams::default(),
            ego_context: None,
        }
    }

    pub fn with_ego_context(mut self, context: EgoContext) -> Self {
        self.ego_context = Some(context);
        self
    }
}

/// Where a response text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Live,
    Cache,
    Oracle,
}

/// A predictor reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResponse {
    pub text: String,
    pub origin: Origin,
    pub latency_ms: Option<u64>,
}
