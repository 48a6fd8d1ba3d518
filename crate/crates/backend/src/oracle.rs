use std::collections::BTreeMap;

use crate::{BackendError, Origin, Predictor, PredictorRequest, RawResponse, Result};

/// Modal label among the given names; ties break to the lexicographically
/// smallest name. `fallback` answers when no labels are present.
pub fn majority_vote_label<'a, I>(labels: I, fallback: &str) -> String
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for label in labels {
        *counts.entry(label).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (name, count) in &counts {
        // ascending name order: strict inequality keeps the smallest name on ties
        if best.is_none_or(|(_, c)| *count > c) {
            best = Some((name, *count));
        }
    }
    best.map(|(name, _)| name.to_string())
        .unwrap_or_else(|| fallback.to_string())
}

/// Label whose keywords occur most often in `text` (case-insensitive,
/// non-overlapping); ties, including the all-zero case, break to the
/// lexicographically smallest label.
pub fn keyword_label(text: &str, keyword_map: &BTreeMap<String, Vec<String>>) -> String {
    let haystack = text.to_lowercase();
    let mut best: Option<(&str, usize)> = None;
    for (label, keywords) in keyword_map {
        let count: usize = keywords
            .iter()
            .map(|k| {
                let needle = k.to_lowercase();
                if needle.is_empty() {
                    0
                } else {
                    haystack.matches(&needle).count()
                }
            })
            .sum();
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((label, count));
        }
    }
    best.map(|(label, _)| label.to_string()).unwrap_or_default()
}

/// Deterministic oracle answering with the modal neighbor label from the
/// structured ego context.
pub struct MajorityVoteOracle {
    pub fallback_label: String,
}

impl MajorityVoteOracle {
    pub fn new(fallback_label: &str) -> Self {
        Self {
            fallback_label: fallback_label.to_string(),
        }
    }
}

impl Predictor for MajorityVoteOracle {
    fn complete(&self, request: &PredictorRequest) -> Result<RawResponse> {
        let context = request.ego_context.as_ref().ok_or_else(|| {
            BackendError::Config("majority-vote oracle needs an ego context".into())
        })?;
        let text = majority_vote_label(
            context.neighbor_label_names.iter().map(|s| s.as_str()),
            &self.fallback_label,
        );
        Ok(RawResponse {
            text,
            origin: Origin::Oracle,
            latency_ms: None,
        })
    }
}

/// Deterministic oracle answering with the label whose keywords dominate
/// the final prompt stage.
pub struct KeywordOracle {
    pub keyword_map: BTreeMap<String, Vec<String>>,
}

impl KeywordOracle {
    pub fn new(keyword_map: BTreeMap<String, Vec<String>>) -> Self {
        Self { keyword_map }
    }
}

impl Predictor for KeywordOracle {
    fn complete(&self, request: &PredictorRequest) -> Result<RawResponse> {
        let text = request
            .user_texts
            .last()
            .map(|t| keyword_label(t, &self.keyword_map))
            .unwrap_or_default();
        Ok(RawResponse {
            text,
            origin: Origin::Oracle,
            latency_ms: None,
        })
    }
}
