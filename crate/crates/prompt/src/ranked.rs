use crate::{PromptError, Result};

/// Parse the ranking reply of an attention extraction stage.
///
/// The first bracketed integer list in `raw` wins. Entries are 1-based in
/// the reply and converted to 0-based indices; out-of-range values and
/// duplicates are dropped (first occurrence kept) and the result is
/// truncated to `k`. Brackets whose contents are not a comma-separated
/// integer list (for example the literal `[1, 2, 3, ...]` echoed from the
/// instructions) are skipped. When no bracketed integer list exists the
/// caller is expected to fall back to the first `min(k, n)` neighbors.
pub fn parse_ranked_list(raw: &str, n_neighbors: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(PromptError::Argument("k must be at least 1".into()));
    }
    let bytes = raw.as_bytes();
    let mut start = 0usize;
    while let Some(open) = raw[start..].find('[') {
        let open = start + open;
        let Some(close) = raw[open + 1..].find(']') else {
            break;
        };
        let close = open + 1 + close;
        if let Some(values) = parse_integer_list(&raw[open + 1..close]) {
            let mut seen = vec![false; n_neighbors];
            let mut out = Vec::new();
            for v in values {
                if v >= 1 && (v as usize) <= n_neighbors {
                    let idx = (v as usize) - 1;
                    if !seen[idx] {
                        seen[idx] = true;
                        out.push(idx);
                    }
                }
            }
            out.truncate(k);
            return Ok(out);
        }
        start = open + 1;
        if start >= bytes.len() {
            break;
        }
    }
    Err(PromptError::UnparsableRanking)
}

fn parse_integer_list(inner: &str) -> Option<Vec<i64>> {
    let trimmed = inner.trim();
    if trimmed.is_empty() {
        return Some(Vec::new());
    }
    trimmed
        .split(',')
        .map(|item| item.trim().parse::<i64>().ok())
        .collect()
}
