use serde::{Deserialize, Serialize};
use tagbench_pipeline::normalized_levenshtein;
use tagbench_prompt::{AnswerFormat, DatasetProfile};

/// Result of mapping a free-text reply onto the label vocabulary. Total:
/// parsing never fails, it only reports unparsable replies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsedLabel {
    Label(usize),
    Unparsable { reason: String },
}

impl ParsedLabel {
    pub fn label(&self) -> Option<usize> {
        match self {
            ParsedLabel::Label(i) => Some(*i),
            ParsedLabel::Unparsable { .. } => None,
        }
    }
}

/// Map a raw reply to a vocabulary index.
///
/// ArXiv formats: the first `cs.XX` pattern occurrence that names a
/// vocabulary entry wins (case-insensitive). Option lists: the
/// earliest-occurring vocabulary name wins; when none occurs, the entry with
/// minimal normalized edit distance to the reply's final line wins if that
/// distance is at most 0.2.
pub fn parse_answer(raw: &str, profile: &DatasetProfile) -> ParsedLabel {
    match profile.answer_format {
        AnswerFormat::ArxivSubcategory | AnswerFormat::ArxivIdentifier => {
            parse_arxiv(raw, &profile.label_vocab)
        }
        AnswerFormat::OptionList => parse_options(raw, &profile.label_vocab),
    }
}

fn parse_arxiv(raw: &str, vocab: &[String]) -> ParsedLabel {
    let chars: Vec<char> = raw.chars().collect();
    let lower: Vec<char> = raw.to_lowercase().chars().collect();
    if lower.len() != chars.len() {
        // non 1:1 case mapping; fall back to a simple lowercase scan
        return parse_arxiv_fallback(&raw.to_lowercase(), vocab);
    }
    for i in 0..lower.len().saturating_sub(4) {
        if lower[i] == 'c' && lower[i + 1] == 's' && lower[i + 2] == '.' {
            let a = lower[i + 3];
            let b = lower[i + 4];
            if !(a.is_ascii_alphabetic() && b.is_ascii_alphabetic()) {
                continue;
            }
            let before_ok = i == 0 || !chars[i - 1].is_ascii_alphanumeric();
            let after_ok = chars
                .get(i + 5)
                .is_none_or(|c| !c.is_ascii_alphabetic());
            if !(before_ok && after_ok) {
                continue;
            }
            let candidate = format!("cs.{}{}", a.to_ascii_uppercase(), b.to_ascii_uppercase());
            if let Some(idx) = vocab
                .iter()
                .position(|v| v.eq_ignore_ascii_case(&candidate))
            {
                return ParsedLabel::Label(idx);
            }
        }
    }
    ParsedLabel::Unparsable {
        reason: "no cs.XX sub-category naming a known label".into(),
    }
}

fn parse_arxiv_fallback(lower: &str, vocab: &[String]) -> ParsedLabel {
    for (idx, name) in vocab.iter().enumerate() {
        if lower.contains(&name.to_lowercase()) {
            return ParsedLabel::Label(idx);
        }
    }
    ParsedLabel::Unparsable {
        reason: "no known label in reply".into(),
    }
}

fn parse_options(raw: &str, vocab: &[String]) -> ParsedLabel {
    let haystack = raw.to_lowercase();
    let mut best: Option<(usize, usize, usize)> = None; // (position, -len ordering via len, index)
    for (idx, name) in vocab.iter().enumerate() {
        let needle = name.to_lowercase();
        if needle.is_empty() {
            continue;
        }
        if let Some(pos) = haystack.find(&needle) {
            let better = match best {
                None => true,
                // earliest occurrence wins; at equal position prefer the
                // longer (more specific) name
                Some((bpos, blen, _)) => pos < bpos || (pos == bpos && needle.len() > blen),
            };
            if better {
                best = Some((pos, needle.len(), idx));
            }
        }
    }
    if let Some((_, _, idx)) = best {
        return ParsedLabel::Label(idx);
    }

    let Some(final_line) = raw.lines().rev().find(|l| !l.trim().is_empty()) else {
        return ParsedLabel::Unparsable {
            reason: "empty reply".into(),
        };
    };
    let mut fuzzy: Option<(f64, usize)> = None;
    for (idx, name) in vocab.iter().enumerate() {
        let d = normalized_levenshtein(final_line.trim(), name);
        let better = match fuzzy {
            None => true,
            Some((bd, _)) => d < bd,
        };
        if better {
            fuzzy = Some((d, idx));
        }
    }
    match fuzzy {
        Some((d, idx)) if d <= 0.2 => ParsedLabel::Label(idx),
        _ => ParsedLabel::Unparsable {
            reason: "no vocabulary name occurs and the final line is not close to any".into(),
        },
    }
}
