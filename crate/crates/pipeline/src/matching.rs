use serde::{Deserialize, Serialize};

use crate::{PipelineError, Result};

/// Lowercase and collapse whitespace runs to single spaces.
pub(crate) fn normalize_text(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Levenshtein distance between the normalized strings, divided by the
/// longer normalized length. Two empty strings are at distance 0.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let a = normalize_text(a);
    let b = normalize_text(b);
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 0.0;
    }
    strsim::levenshtein(&a, &b) as f64 / max_len as f64
}

/// Acceptance threshold for fuzzy title matches, as a normalized distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPolicy {
    pub threshold: f64,
}

impl Default for MatchPolicy {
    /// Tolerates casing and punctuation drift without conflating distinct
    /// titles.
    fn default() -> Self {
        Self { threshold: 0.15 }
    }
}

impl MatchPolicy {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(PipelineError::Argument(format!(
                "match threshold {threshold} outside (0, 1)"
            )));
        }
        Ok(Self { threshold })
    }
}

/// Whether a found title is close enough to the searched title.
pub fn title_match(found: &str, searched: &str, policy: &MatchPolicy) -> bool {
    normalized_levenshtein(found, searched) <= policy.threshold
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kitten_sitting() {
        // 3 edits over max length 7
        let d = normalized_levenshtein("kitten", "sitting");
        assert!((d - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn identical_and_empty() {
        assert_eq!(normalized_levenshtein("Same Title", "same  title"), 0.0);
        assert_eq!(normalized_levenshtein("", ""), 0.0);
        assert_eq!(normalized_levenshtein("", "abc"), 1.0);
    }

    #[test]
    fn exact_titles_match_any_threshold() {
        let policy = MatchPolicy::new(0.01).unwrap();
        assert!(title_match("Graph Attention", "Graph Attention", &policy));
    }

    #[test]
    fn disjoint_titles_do_not_match() {
        let policy = MatchPolicy::default();
        assert!(!title_match("abcdefghij", "klmnopqrst", &policy));
    }

    #[test]
    fn punctuation_drift_matches_at_default_threshold() {
        let policy = MatchPolicy::default();
        let a = "Attention Is All You Need";
        let b = "attention is all you need.";
        assert!(normalized_levenshtein(a, b) <= policy.threshold);
        assert!(title_match(a, b, &policy));
    }

    #[test]
    fn invalid_thresholds_rejected() {
        assert!(MatchPolicy::new(0.0).is_err());
        assert!(MatchPolicy::new(1.0).is_err());
    }
}
