use std::sync::OnceLock;

use regex::Regex;

/// Extract normalized arXiv identifiers from free text.
///
/// Both id schemes are recognized: new-style `YYMM.NNNN[N]` and old-style
/// `archive[.SC]/YYMMNNN`. Version suffixes (`v2`) are stripped, duplicates
/// collapse to the first occurrence, and output preserves text order.
pub fn extract_arxiv_ids(text: &str) -> Vec<String> {
    static NEW_STYLE: OnceLock<Regex> = OnceLock::new();
    static OLD_STYLE: OnceLock<Regex> = OnceLock::new();
    let new_style =
        NEW_STYLE.get_or_init(|| Regex::new(r"\d{4}\.\d{4,5}(?:v\d+)?").unwrap());
    let old_style = OLD_STYLE.get_or_init(|| {
        Regex::new(r"(?i)[a-z][a-z-]*(?:\.[A-Z]{2})?/\d{7}(?:v\d+)?").unwrap()
    });

    let bytes = text.as_bytes();
    let boundary_ok = |start: usize, end: usize, digits_only: bool| {
        let before_ok = match start.checked_sub(1).map(|i| bytes[i] as char) {
            // a digit, dot or slash directly before means we matched inside
            // a longer token
            Some(c) => !(c.is_ascii_digit() || c == '.' || (digits_only && c == '/')),
            None => true,
        };
        let after_ok = match bytes.get(end).map(|&b| b as char) {
            Some(c) => !(c.is_ascii_digit() || c == '.'),
            None => true,
        };
        before_ok && after_ok
    };

    let mut found: Vec<(usize, String)> = Vec::new();
    for m in new_style.find_iter(text) {
        if boundary_ok(m.start(), m.end(), true) {
            let id = strip_version(m.as_str()).to_string();
            found.push((m.start(), id));
        }
    }
    for m in old_style.find_iter(text) {
        if boundary_ok(m.start(), m.end(), false) {
            let id = strip_version(m.as_str()).to_ascii_lowercase();
            // keep the subject class in its canonical upper case
            let id = match id.split_once('/') {
                Some((archive, number)) => match archive.split_once('.') {
                    Some((root, subject)) => {
                        format!("{root}.{}/{number}", subject.to_ascii_uppercase())
                    }
                    None => format!("{archive}/{number}"),
                },
                None => id,
            };
            found.push((m.start(), id));
        }
    }

    found.sort_by_key(|(pos, _)| *pos);
    let mut out = Vec::new();
    for (_, id) in found {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

fn strip_version(id: &str) -> &str {
    match id.rfind('v') {
        Some(pos) if id[pos + 1..].chars().all(|c| c.is_ascii_digit())
            && !id[pos + 1..].is_empty() =>
        {
            &id[..pos]
        }
        _ => id,
    }
}
