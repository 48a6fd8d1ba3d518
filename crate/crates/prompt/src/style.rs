use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{PromptError, Result};

/// Richness of the textual context: rich includes the body/abstract block,
/// scarce uses only the title.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextContext {
    Rich,
    Scarce,
}

impl fmt::Display for TextContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextContext::Rich => "rich",
            TextContext::Scarce => "scarce",
        })
    }
}

/// The prompt style families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StyleKind {
    ZeroShot,
    ZeroShotCot,
    FewShot,
    KhopTitle,
    KhopTitleLabel,
    KhopAttention,
    LinearizedKhopTitle,
    LinearizedKhopTitleLabel,
    LinearizedKhopAttention,
}

impl StyleKind {
    pub fn uses_neighbors(self) -> bool {
        !matches!(
            self,
            StyleKind::ZeroShot | StyleKind::ZeroShotCot | StyleKind::FewShot
        )
    }

    pub fn is_attention(self) -> bool {
        matches!(
            self,
            StyleKind::KhopAttention | StyleKind::LinearizedKhopAttention
        )
    }

    pub fn is_linearized(self) -> bool {
        matches!(
            self,
            StyleKind::LinearizedKhopTitle
                | StyleKind::LinearizedKhopTitleLabel
                | StyleKind::LinearizedKhopAttention
        )
    }

    pub fn includes_labels(self) -> bool {
        matches!(
            self,
            StyleKind::KhopTitleLabel | StyleKind::LinearizedKhopTitleLabel
        )
    }
}

/// A fully specified prompt style: kind plus hop count and, for attention
/// styles, the number of neighbors the ranking step may select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PromptStyle {
    kind: StyleKind,
    hops: u8,
    attention_k: usize,
}

/// Ranking size used throughout the benchmark; overridable per style.
pub const DEFAULT_ATTENTION_K: usize = 5;

impl PromptStyle {
    pub fn new(kind: StyleKind, hops: u8, attention_k: usize) -> Result<Self> {
        if kind.uses_neighbors() && !(1..=2).contains(&hops) {
            return Err(PromptError::InvalidStyle(format!(
                "hops must be 1 or 2, got {hops}"
            )));
        }
        if kind.is_attention() && hops != 1 {
            return Err(PromptError::InvalidStyle(
                "attention styles are one-hop only".into(),
            ));
        }
        if kind.is_attention() && attention_k == 0 {
            return Err(PromptError::InvalidStyle(
                "attention_k must be at least 1".into(),
            ));
        }
        Ok(Self {
            kind,
            hops: if kind.uses_neighbors() { hops } else { 1 },
            attention_k,
        })
    }

    pub fn zero_shot() -> Self {
        Self::new(StyleKind::ZeroShot, 1, DEFAULT_ATTENTION_K).unwrap()
    }

    pub fn zero_shot_cot() -> Self {
        Self::new(StyleKind::ZeroShotCot, 1, DEFAULT_ATTENTION_K).unwrap()
    }

    pub fn few_shot() -> Self {
        Self::new(StyleKind::FewShot, 1, DEFAULT_ATTENTION_K).unwrap()
    }

    pub fn khop_title(hops: u8) -> Self {
        Self::new(StyleKind::KhopTitle, hops, DEFAULT_ATTENTION_K).unwrap()
    }

    pub fn khop_title_label(hops: u8) -> Self {
        Self::new(StyleKind::KhopTitleLabel, hops, DEFAULT_ATTENTION_K).unwrap()
    }

    pub fn attention(k: usize) -> Self {
        Self::new(StyleKind::KhopAttention, 1, k).unwrap()
    }

    pub fn kind(&self) -> StyleKind {
        self.kind
    }

    pub fn hops(&self) -> u8 {
        self.hops
    }

    pub fn attention_k(&self) -> usize {
        self.attention_k
    }

    pub fn with_attention_k(mut self, k: usize) -> Result<Self> {
        if self.kind.is_attention() && k == 0 {
            return Err(PromptError::InvalidStyle(
                "attention_k must be at least 1".into(),
            ));
        }
        self.attention_k = k;
        Ok(self)
    }
}

impl fmt::Display for PromptStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hops;
        match self.kind {
            StyleKind::ZeroShot => write!(f, "zero-shot"),
            StyleKind::ZeroShotCot => write!(f, "zero-shot-cot"),
            StyleKind::FewShot => write!(f, "few-shot"),
            StyleKind::KhopTitle => write!(f, "{h}-hop-title"),
            StyleKind::KhopTitleLabel => write!(f, "{h}-hop-title-label"),
            StyleKind::KhopAttention => write!(f, "{h}-hop-attention"),
            StyleKind::LinearizedKhopTitle => write!(f, "linearized-{h}-hop-title"),
            StyleKind::LinearizedKhopTitleLabel => write!(f, "linearized-{h}-hop-title-label"),
            StyleKind::LinearizedKhopAttention => write!(f, "linearized-{h}-hop-attention"),
        }
    }
}

impl FromStr for PromptStyle {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self> {
        let (linearized, rest) = match s.strip_prefix("linearized-") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let style = match rest {
            "zero-shot" if !linearized => Self::zero_shot(),
            "zero-shot-cot" if !linearized => Self::zero_shot_cot(),
            "few-shot" if !linearized => Self::few_shot(),
            _ => {
                let (hops, kind_name) = rest
                    .split_once("-hop-")
                    .ok_or_else(|| PromptError::InvalidStyle(s.to_string()))?;
                let hops: u8 = hops
                    .parse()
                    .map_err(|_| PromptError::InvalidStyle(s.to_string()))?;
                let kind = match (kind_name, linearized) {
                    ("title", false) => StyleKind::KhopTitle,
                    ("title-label", false) => StyleKind::KhopTitleLabel,
                    ("attention", false) => StyleKind::KhopAttention,
                    ("title", true) => StyleKind::LinearizedKhopTitle,
                    ("title-label", true) => StyleKind::LinearizedKhopTitleLabel,
                    ("attention", true) => StyleKind::LinearizedKhopAttention,
                    _ => return Err(PromptError::InvalidStyle(s.to_string())),
                };
                Self::new(kind, hops, DEFAULT_ATTENTION_K)?
            }
        };
        Ok(style)
    }
}

impl Serialize for PromptStyle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PromptStyle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All nine style variants at the given hop depth for the khop families.
pub fn all_styles(hops: u8, attention_k: usize) -> Vec<PromptStyle> {
    [
        StyleKind::ZeroShot,
        StyleKind::ZeroShotCot,
        StyleKind::FewShot,
        StyleKind::KhopTitle,
        StyleKind::KhopTitleLabel,
        StyleKind::KhopAttention,
        StyleKind::LinearizedKhopTitle,
        StyleKind::LinearizedKhopTitleLabel,
        StyleKind::LinearizedKhopAttention,
    ]
    .into_iter()
    .map(|kind| {
        let h = if kind.is_attention() { 1 } else { hops };
        PromptStyle::new(kind, h, attention_k).unwrap()
    })
    .collect()
}
