use serde::{Deserialize, Serialize};

/// Minimal paper metadata as it flows through the construction pipeline.
///
/// `raw_reference_strings` hold whatever the upstream extractor produced for
/// the bibliography, one string per reference; they are searched for arXiv
/// ids first and used as title queries second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperStub {
    #[serde(default)]
    pub arxiv_id: Option<String>,
    pub title: String,
    pub year: i32,
    #[serde(default)]
    pub raw_reference_strings: Vec<String>,
}

impl PaperStub {
    /// Stable node key: the arXiv id when known, otherwise a normalized
    /// title slug.
    pub fn node_key(&self) -> String {
        match &self.arxiv_id {
            Some(id) => id.clone(),
            None => format!("title:{}", crate::matching::normalize_text(&self.title)),
        }
    }
}
