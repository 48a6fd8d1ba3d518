use serde::{Deserialize, Serialize};
use tagbench_core::HopCaps;

use crate::template;
use crate::{PromptError, Result};

/// How a predictor is expected to phrase its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerFormat {
    /// `cs.XX` sub-category names.
    ArxivSubcategory,
    /// `arxiv cs.xx` identifiers; parsed the same way as sub-categories.
    ArxivIdentifier,
    /// Free text naming one of the vocabulary entries.
    OptionList,
}

/// Dataset-level prompting configuration: the system prompt, the answer
/// format, the label vocabulary and the per-hop neighbor caps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub name: String,
    pub system_prompt: String,
    pub answer_format: AnswerFormat,
    pub label_vocab: Vec<String>,
    pub caps: HopCaps,
}

pub const CORA_CATEGORIES: [&str; 7] = [
    "Rule Learning",
    "Neural Networks",
    "Case Based",
    "Genetic Algorithms",
    "Theory",
    "Reinforcement Learning",
    "Probabilistic Methods",
];

pub const PUBMED_TYPES: [&str; 3] = [
    "Type 1 diabetes",
    "Type 2 diabetes",
    "Experimentally induced diabetes",
];

fn options_block(vocab: &[String]) -> String {
    let mut out = String::new();
    for name in vocab {
        out.push_str(name);
        out.push('\n');
    }
    out
}

impl DatasetProfile {
    /// The arXiv CS profile; the vocabulary (sub-category names) comes from
    /// the dataset's label file.
    pub fn arxiv(name: &str, label_vocab: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            system_prompt: template::SYSTEM_ARXIV.to_string(),
            answer_format: AnswerFormat::ArxivSubcategory,
            label_vocab,
            caps: HopCaps::new(20, 5),
        }
    }

    pub fn cora() -> Self {
        Self {
            name: "cora".into(),
            system_prompt: template::SYSTEM_CORA.to_string(),
            answer_format: AnswerFormat::OptionList,
            label_vocab: CORA_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            caps: HopCaps::new(20, 5),
        }
    }

    pub fn pubmed() -> Self {
        Self {
            name: "pubmed".into(),
            system_prompt: template::SYSTEM_PUBMED.to_string(),
            answer_format: AnswerFormat::OptionList,
            label_vocab: PUBMED_TYPES.iter().map(|s| s.to_string()).collect(),
            caps: HopCaps::new(20, 5),
        }
    }

    /// Product co-purchasing profile; larger neighbor caps.
    pub fn products(label_vocab: Vec<String>) -> Self {
        let system_prompt = template::fill(
            template::SYSTEM_PRODUCTS,
            &[("options", &options_block(&label_vocab))],
        );
        Self {
            name: "products".into(),
            system_prompt,
            answer_format: AnswerFormat::OptionList,
            label_vocab,
            caps: HopCaps::new(40, 10),
        }
    }

    /// Generic option-list profile for synthetic datasets.
    pub fn generic(name: &str, label_vocab: Vec<String>, caps: HopCaps) -> Self {
        let system_prompt = template::fill(
            template::SYSTEM_OPTION_GENERIC,
            &[("options", &options_block(&label_vocab))],
        );
        Self {
            name: name.to_string(),
            system_prompt,
            answer_format: AnswerFormat::OptionList,
            label_vocab,
            caps,
        }
    }

    /// Look up a built-in profile by name.
    pub fn builtin(name: &str, label_vocab: Vec<String>) -> Option<Self> {
        match name {
            "arxiv" | "ogbn-arxiv" | "arxiv-2023" => Some(Self::arxiv(name, label_vocab)),
            "cora" => Some(Self::cora()),
            "pubmed" => Some(Self::pubmed()),
            "products" | "ogbn-products" => Some(Self::products(label_vocab)),
            _ => None,
        }
    }

    pub fn label_name(&self, index: usize) -> Result<&str> {
        self.label_vocab
            .get(index)
            .map(|s| s.as_str())
            .ok_or(PromptError::LabelOutOfRange {
                index,
                vocab_len: self.label_vocab.len(),
            })
    }

    /// Option-list profiles must enumerate the full vocabulary in their
    /// system prompt, in vocabulary order.
    pub fn validate(&self) -> Result<()> {
        if self.answer_format == AnswerFormat::OptionList {
            let mut cursor = 0usize;
            for name in &self.label_vocab {
                match self.system_prompt[cursor..].find(name.as_str()) {
                    Some(pos) => cursor += pos + name.len(),
                    None => {
                        return Err(PromptError::Argument(format!(
                            "system prompt for {} does not enumerate label {name:?} in order",
                            self.name
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        DatasetProfile::cora().validate().unwrap();
        DatasetProfile::pubmed().validate().unwrap();
        DatasetProfile::arxiv("arxiv", vec!["cs.AI".into()])
            .validate()
            .unwrap();
        DatasetProfile::products(vec!["Home & Kitchen".into(), "Books".into()])
            .validate()
            .unwrap();
    }

    #[test]
    fn generic_profile_lists_vocab_in_order() {
        let p = DatasetProfile::generic(
            "toy",
            vec!["A".into(), "B".into()],
            HopCaps::new(5, 2),
        );
        p.validate().unwrap();
        let a = p.system_prompt.find("A\n").unwrap();
        let b = p.system_prompt.find("B\n").unwrap();
        assert!(a < b);
    }

    #[test]
    fn out_of_order_enumeration_fails_validation() {
        let mut p = DatasetProfile::generic(
            "toy",
            vec!["A".into(), "B".into()],
            HopCaps::new(5, 2),
        );
        p.label_vocab.reverse();
        assert!(p.validate().is_err());
    }
}
